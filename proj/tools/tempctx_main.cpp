// tempctx: synthetic data, training, embedding export and evaluation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tempctx/checkpoint.hpp"
#include "tempctx/classifier.hpp"
#include "tempctx/config.hpp"
#include "tempctx/dataset.hpp"
#include "tempctx/embedder.hpp"
#include "tempctx/error.hpp"
#include "tempctx/eval.hpp"
#include "tempctx/synth.hpp"
#include "tempctx/trainer.hpp"

namespace fs = std::filesystem;
using namespace tempctx;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant;
  bool no_hard_negatives = false;
  bool raw_features = false;
  std::vector<std::string> overrides;  // key=value
  std::string data;
  std::string checkpoint;
  std::string out;
  std::string csv;
  std::string resume;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key=value config file");
  cmd->add_option("--seed", c.seed, "overrides the config seed");
  cmd->add_option("--variant", c.variant, "full, no_future or no_temporal")
      ->check(CLI::IsMember({"full", "no_future", "no_temporal"}));
  cmd->add_flag("--no-hard-negatives", c.no_hard_negatives, "draw all negatives from other sequences");
  cmd->add_flag("--raw-features", c.raw_features, "use input features as embeddings");
  cmd->add_option("--set", c.overrides, "config override key=value (repeatable)");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig() : RunConfig::from_file(c.config_path);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) cfg.set("seed", std::to_string(*c.seed));
  if (c.variant) cfg.set("variant", *c.variant);
  if (c.no_hard_negatives) cfg.set("hard_negatives", "false");
  std::cerr << "# resolved config (digest " << cfg.digest() << ")\n" << cfg.resolved_text();
  return cfg;
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text)) throw DataError("cannot write " + p.string());
}

Embedder make_embedder(const Common& c) {
  if (c.raw_features) {
    if (!c.checkpoint.empty()) throw UsageError("--raw-features and --checkpoint are exclusive");
    return Embedder::raw();
  }
  if (c.checkpoint.empty()) throw UsageError("need --checkpoint or --raw-features");
  return Embedder::learned(load_checkpoint(c.checkpoint).model);
}

int gen_synth(const Common& c) {
  const RunConfig cfg = resolve(c);
  const Dataset d = generate(cfg.synth());
  const auto manifest = save_dataset(d, c.out);
  write_text(fs::path(c.out) / "config.resolved", cfg.resolved_text());
  std::cerr << "wrote " << d.sequences.size() << " sequences to " << manifest.string() << "\n";
  return 0;
}

int train_cmd(const Common& c) {
  const RunConfig cfg = resolve(c);
  const Dataset d = load_dataset(c.data);
  const TrainConfig tc = cfg.train();

  EmbeddingModel model;
  std::size_t start = 0;
  if (!c.resume.empty()) {
    const Checkpoint ck = load_checkpoint(c.resume);
    if (ck.config_digest != tc.config_digest)
      std::cerr << "warning: resuming from a checkpoint written under config digest " << ck.config_digest
                << ", current digest is " << tc.config_digest << "\n";
    model = ck.model;
    start = ck.iteration;
  } else {
    model = init_model(d.dim, cfg.emb_dim(), cfg.seed());
    model.dropout_rate = cfg.dropout_rate();
  }

  const fs::path out(c.out);
  fs::create_directories(out);
  write_text(out / "config.resolved", cfg.resolved_text());
  const TrainResult res = train(d, model, cfg.sampler(), tc, out, start);
  write_train_log_csv(res.log, start, out / "train_log.csv");
  if (!res.log.loss.empty())
    std::cerr << "iterations " << start << ".." << res.final_iteration << ", loss " << res.log.loss.front() << " -> "
              << res.log.loss.back() << "\n";
  return 0;
}

int embed_cmd(const Common& c) {
  resolve(c);
  const Dataset d = load_dataset(c.data);
  const Embedder e = make_embedder(c);
  write_embeddings_tsv(d, embed_all_parallel(d, e), c.out);
  return 0;
}

int eval_cmd(const std::string& task, const Common& c) {
  const RunConfig cfg = resolve(c);
  const Dataset d = load_dataset(c.data);
  const Embedder e = make_embedder(c);
  EvalReport r;
  if (task == "event") r = event_retrieval_map(d, e, cfg.event_frames());
  else if (task == "temporal") r = temporal_retrieval_map(d, e, cfg.min_len());
  else if (task == "order") r = order_recovery_eval(d, e, cfg.order_frames());
  else r = classification_eval(split_train_test(d), e, cfg.classifier());
  if (fs::path(c.out).has_parent_path()) fs::create_directories(fs::path(c.out).parent_path());
  write_report(r, c.out, c.csv.empty() ? std::nullopt : std::optional<fs::path>(c.csv));
  std::printf("%s %.6f (%zu queries)\n", r.task.c_str(), r.aggregate, r.per_query.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal-context frame embeddings: train and evaluate"};
  app.require_subcommand(1);
  Common c;

  auto* gen = app.add_subcommand("gen-synth", "generate a synthetic dataset directory");
  add_common(gen, c);
  gen->add_option("--out", c.out, "output directory")->required();

  auto* tr = app.add_subcommand("train", "train an embedding model");
  add_common(tr, c);
  tr->add_option("--data", c.data, "dataset manifest")->required();
  tr->add_option("--out", c.out, "checkpoint directory")->required();
  tr->add_option("--resume", c.resume, "checkpoint to continue from");

  auto* em = app.add_subcommand("embed", "export frame embeddings as TSV");
  add_common(em, c);
  em->add_option("--data", c.data, "dataset manifest")->required();
  em->add_option("--checkpoint", c.checkpoint, "model checkpoint");
  em->add_option("--out", c.out, "output TSV")->required();

  const std::vector<std::pair<std::string, std::string>> evals{{"eval-event", "event"},
                                                               {"eval-temporal", "temporal"},
                                                               {"eval-order", "order"},
                                                               {"eval-classify", "classify"}};
  std::vector<CLI::App*> eval_cmds;
  for (const auto& [name, task] : evals) {
    auto* ev = app.add_subcommand(name, "evaluate (" + task + ")");
    add_common(ev, c);
    ev->add_option("--data", c.data, "dataset manifest")->required();
    ev->add_option("--checkpoint", c.checkpoint, "model checkpoint");
    ev->add_option("--out", c.out, "JSON report")->required();
    ev->add_option("--csv", c.csv, "per-query CSV report");
    eval_cmds.push_back(ev);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::usage);
  }

  try {
    if (gen->parsed()) return gen_synth(c);
    if (tr->parsed()) return train_cmd(c);
    if (em->parsed()) return embed_cmd(c);
    for (std::size_t i = 0; i < eval_cmds.size(); ++i)
      if (eval_cmds[i]->parsed()) return eval_cmd(evals[i].second, c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::data);
  }
  return static_cast<int>(ErrorKind::usage);
}
