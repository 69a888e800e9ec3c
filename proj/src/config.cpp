#include "tempctx/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tempctx/error.hpp"

namespace tempctx {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const auto x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw UsageError("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

StateRef to_state(const std::string& key, const std::string& v) {
  const auto parts = split(v, ':');
  if (parts.size() != 2) throw UsageError("config key '" + key + "': expected event:state, got '" + v + "'");
  return {to_u64(key, parts[0]), to_u64(key, parts[1])};
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig::RunConfig()
    : values_{
          {"seed", "1"},
          {"emb_dim", "32"},
          {"dropout_rate", "0.5"},
          // sampler
          {"window", "2"},
          {"strides", "1,2,4"},
          {"negatives_per_target", "4"},
          {"hard_fraction", "0.5"},
          {"variant", "full"},
          {"hard_negatives", "true"},
          // trainer
          {"lr0", "0.01"},
          {"anneal_every", "5000"},
          {"anneal_factor", "0.5"},
          {"batch_size", "256"},
          {"iterations", "5000"},
          {"checkpoint_every", "0"},
          {"deterministic", "true"},
          {"parallel", "true"},
          // synthetic data
          {"num_events", "5"},
          {"states_per_event", "6"},
          {"dim", "32"},
          {"num_sequences", "200"},
          {"seq_len", "40"},
          {"emission_noise", "0.1"},
          {"advance_prob", "0.3"},
          {"alias_pairs", "0:1-1:1,2:1-3:1"},
          {"nuisance_rank", "4"},
          {"nuisance_scale", "3"},
          // evaluation
          {"min_len", "19"},
          {"order_frames", "12"},
          {"event_frames", "4"},
          {"clf_reg_lambda", "1e-4"},
          {"clf_epochs", "100"},
          {"clf_lr", "0.1"},
          {"clf_anneal_every", "25"},
          {"clf_anneal_factor", "0.5"},
      } {}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
  it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
  return it->second;
}

std::string RunConfig::resolved_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::string RunConfig::digest() const { return fnv1a_hex(resolved_text()); }

std::uint64_t RunConfig::seed() const { return to_u64("seed", get("seed")); }
std::size_t RunConfig::emb_dim() const { return to_u64("emb_dim", get("emb_dim")); }
double RunConfig::dropout_rate() const { return to_double("dropout_rate", get("dropout_rate")); }
std::size_t RunConfig::min_len() const { return to_u64("min_len", get("min_len")); }
std::size_t RunConfig::order_frames() const { return to_u64("order_frames", get("order_frames")); }
std::size_t RunConfig::event_frames() const { return to_u64("event_frames", get("event_frames")); }

SamplerConfig RunConfig::sampler() const {
  SamplerConfig s;
  s.window = to_u64("window", get("window"));
  s.strides.clear();
  for (const auto& r : split(get("strides"), ',')) s.strides.push_back(to_u64("strides", r));
  s.negatives_per_target = to_u64("negatives_per_target", get("negatives_per_target"));
  s.hard_fraction = to_double("hard_fraction", get("hard_fraction"));
  s.variant = parse_variant(get("variant"));
  validate(s);
  return s;
}

TrainConfig RunConfig::train() const {
  TrainConfig t;
  t.lr0 = to_double("lr0", get("lr0"));
  t.anneal_every = to_u64("anneal_every", get("anneal_every"));
  t.anneal_factor = to_double("anneal_factor", get("anneal_factor"));
  t.batch_size = to_u64("batch_size", get("batch_size"));
  t.iterations = to_u64("iterations", get("iterations"));
  t.seed = seed();
  t.variant = parse_variant(get("variant"));
  t.hard_negatives = to_bool("hard_negatives", get("hard_negatives"));
  t.checkpoint_every = to_u64("checkpoint_every", get("checkpoint_every"));
  t.deterministic = to_bool("deterministic", get("deterministic"));
  t.parallel = to_bool("parallel", get("parallel"));
  t.config_digest = digest();
  validate(t);
  return t;
}

SynthSpec RunConfig::synth() const {
  SynthSpec s;
  s.num_events = to_u64("num_events", get("num_events"));
  s.states_per_event = to_u64("states_per_event", get("states_per_event"));
  s.dim = to_u64("dim", get("dim"));
  s.num_sequences = to_u64("num_sequences", get("num_sequences"));
  s.seq_len = to_u64("seq_len", get("seq_len"));
  s.emission_noise = to_double("emission_noise", get("emission_noise"));
  s.advance_prob = to_double("advance_prob", get("advance_prob"));
  s.nuisance_rank = to_u64("nuisance_rank", get("nuisance_rank"));
  s.nuisance_scale = to_double("nuisance_scale", get("nuisance_scale"));
  s.alias_pairs.clear();
  for (const auto& pair : split(get("alias_pairs"), ',')) {
    const auto dash = pair.find('-');
    if (dash == std::string::npos)
      throw UsageError("config key 'alias_pairs': expected e:s-e:s, got '" + pair + "'");
    s.alias_pairs.emplace_back(to_state("alias_pairs", pair.substr(0, dash)),
                               to_state("alias_pairs", pair.substr(dash + 1)));
  }
  s.seed = seed();
  validate(s);
  return s;
}

ClassifierConfig RunConfig::classifier() const {
  ClassifierConfig c;
  c.reg_lambda = to_double("clf_reg_lambda", get("clf_reg_lambda"));
  c.epochs = to_u64("clf_epochs", get("clf_epochs"));
  c.lr = to_double("clf_lr", get("clf_lr"));
  c.anneal_every = to_u64("clf_anneal_every", get("clf_anneal_every"));
  c.anneal_factor = to_double("clf_anneal_factor", get("clf_anneal_factor"));
  c.seed = seed();
  if (c.anneal_every < 1) throw UsageError("clf_anneal_every must be >= 1");
  return c;
}

}  // namespace tempctx
