#include "tempctx/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tempctx/checkpoint.hpp"
#include "tempctx/error.hpp"

namespace tempctx {

namespace {

constexpr std::uint64_t kBatchStream = 0xba7c4;
constexpr std::uint64_t kDropoutStream = 0xd709;

ExampleLoss one_example(const EmbeddingModel& m, const Dataset& d, const TrainingExample& ex, std::uint64_t seed,
                        std::uint64_t iteration, std::size_t index, bool dropout) {
  if (dropout && m.dropout_rate > 0.0) {
    Rng rng = Rng::derive(seed, {kDropoutStream, iteration, index});
    return example_loss(m, d, ex, Mode::train, &rng);
  }
  return example_loss(m, d, ex, Mode::eval, nullptr);
}

std::string checkpoint_name(std::size_t iter) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "ckpt_%08zu.bin", iter);
  return buf;
}

bool all_finite(const ParamGrad& g) {
  for (double v : g.weights)
    if (!std::isfinite(v)) return false;
  for (double v : g.bias)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (!(cfg.lr0 >= 0.0) || !std::isfinite(cfg.lr0)) throw UsageError("lr0 must be a finite non-negative number");
  if (cfg.anneal_every < 1) throw UsageError("anneal_every must be >= 1");
  if (!(cfg.anneal_factor > 0.0 && cfg.anneal_factor < 1.0)) throw UsageError("anneal_factor must lie in (0, 1)");
  if (cfg.batch_size < 1) throw UsageError("batch_size must be >= 1");
}

double lr_at(const TrainConfig& cfg, std::size_t iter) {
  return cfg.lr0 * std::pow(cfg.anneal_factor, static_cast<double>(iter / cfg.anneal_every));
}

BatchGradient batch_gradient_serial(const EmbeddingModel& m, const Dataset& d,
                                    std::span<const TrainingExample> batch, std::uint64_t seed,
                                    std::uint64_t iteration, bool dropout) {
  BatchGradient out;
  out.grad = ParamGrad(m);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto r = one_example(m, d, batch[i], seed, iteration, i, dropout);
    out.mean_loss += r.loss;
    out.grad.add(r.grad);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.mean_loss *= inv;
  out.grad.scale(inv);
  return out;
}

BatchGradient batch_gradient_parallel(const EmbeddingModel& m, const Dataset& d,
                                      std::span<const TrainingExample> batch, std::uint64_t seed,
                                      std::uint64_t iteration, bool dropout, bool ordered_reduction) {
  const auto n = static_cast<std::ptrdiff_t>(batch.size());
  BatchGradient out;
  out.grad = ParamGrad(m);

  if (ordered_reduction) {
    // Fan out into per-example slots, then reduce in example order.
    std::vector<ExampleLoss> slots(batch.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      slots[i] = one_example(m, d, batch[i], seed, iteration, static_cast<std::size_t>(i), dropout);
    for (const auto& s : slots) {
      out.mean_loss += s.loss;
      out.grad.add(s.grad);
    }
  } else {
    double loss = 0.0;
#pragma omp parallel reduction(+ : loss)
    {
      ParamGrad local(m);
#pragma omp for schedule(dynamic, 8) nowait
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto r = one_example(m, d, batch[i], seed, iteration, static_cast<std::size_t>(i), dropout);
        loss += r.loss;
        local.add(r.grad);
      }
#pragma omp critical
      out.grad.add(local);
    }
    out.mean_loss = loss;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.mean_loss *= inv;
  out.grad.scale(inv);
  return out;
}

std::vector<TrainingExample> batch_for_iteration(const Sampler& sampler, std::uint64_t seed,
                                                 std::uint64_t iteration, std::size_t batch_size) {
  Rng rng = Rng::derive(seed, {kBatchStream, iteration});
  return sampler.batch(batch_size, rng);
}

SamplerConfig effective_sampler(const SamplerConfig& base, const TrainConfig& cfg) {
  SamplerConfig s = base;
  s.variant = cfg.variant;
  if (!cfg.hard_negatives) s.hard_fraction = 0.0;
  return s;
}

TrainResult train(const Dataset& d, EmbeddingModel model, const SamplerConfig& sampler_cfg, const TrainConfig& cfg,
                  const std::optional<std::filesystem::path>& checkpoint_dir, std::size_t start_iteration) {
  validate(cfg);
  validate(model);
  if (model.in_dim != d.dim)
    throw DataError("model input dim " + std::to_string(model.in_dim) + " does not match dataset dim " +
                    std::to_string(d.dim));
  const Sampler sampler(d, effective_sampler(sampler_cfg, cfg));
  if (checkpoint_dir) std::filesystem::create_directories(*checkpoint_dir);

  const auto t0 = std::chrono::steady_clock::now();
  TrainResult res;
  snap_to_float(model);
  for (std::size_t it = start_iteration; it < cfg.iterations; ++it) {
    const auto batch = batch_for_iteration(sampler, cfg.seed, it, cfg.batch_size);
    const BatchGradient g =
        cfg.parallel ? batch_gradient_parallel(model, d, batch, cfg.seed, it, cfg.dropout, cfg.deterministic)
                     : batch_gradient_serial(model, d, batch, cfg.seed, it, cfg.dropout);
    if (!std::isfinite(g.mean_loss) || !all_finite(g.grad))
      throw NumericalError("non-finite loss or gradient at iteration " + std::to_string(it));

    // Plain SGD; parameters stay on the float32 grid.
    const double lr = lr_at(cfg, it);
    for (std::size_t i = 0; i < model.weights.size(); ++i)
      model.weights[i] = static_cast<float>(model.weights[i] - lr * g.grad.weights[i]);
    for (std::size_t i = 0; i < model.bias.size(); ++i)
      model.bias[i] = static_cast<float>(model.bias[i] - lr * g.grad.bias[i]);

    res.log.loss.push_back(g.mean_loss);
    res.log.lr.push_back(lr);

    const std::size_t done = it + 1;
    if (checkpoint_dir && cfg.checkpoint_every > 0 && done % cfg.checkpoint_every == 0 && done < cfg.iterations)
      save_checkpoint({model, done, cfg.config_digest}, *checkpoint_dir / checkpoint_name(done));
  }
  res.final_iteration = std::max(start_iteration, cfg.iterations);
  if (checkpoint_dir) save_checkpoint({model, res.final_iteration, cfg.config_digest}, *checkpoint_dir / "final.bin");
  res.log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.model = std::move(model);
  return res;
}

void write_train_log_csv(const TrainLog& log, std::size_t start_iteration, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "iteration,loss,lr\n";
  char buf[96];
  for (std::size_t i = 0; i < log.loss.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", start_iteration + i, log.loss[i], log.lr[i]);
    out << buf;
  }
}

}  // namespace tempctx
