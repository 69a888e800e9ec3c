#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tempctx/dataset.hpp"
#include "tempctx/model.hpp"
#include "tempctx/objective.hpp"
#include "tempctx/sampler.hpp"

namespace tempctx {

struct TrainConfig {
  double lr0 = 0.01;
  std::size_t anneal_every = 5000;
  double anneal_factor = 0.5;
  std::size_t batch_size = 256;
  std::size_t iterations = 5000;
  std::uint64_t seed = 1;
  ContextVariant variant = ContextVariant::full;
  bool hard_negatives = true;
  std::size_t checkpoint_every = 0;  // 0: only the final checkpoint
  bool deterministic = true;         // ordered reduction of per-example gradients
  bool parallel = true;              // OpenMP fan-out over examples when available
  bool dropout = true;               // false for gradient-check runs
  std::string config_digest;         // stamped into checkpoints
};

void validate(const TrainConfig& cfg);

// lr0 * anneal_factor^floor(iter / anneal_every)
double lr_at(const TrainConfig& cfg, std::size_t iter);

struct TrainLog {
  std::vector<double> loss;  // mean batch loss per iteration
  std::vector<double> lr;
  double wall_seconds = 0.0;
};

struct TrainResult {
  EmbeddingModel model;
  TrainLog log;
  std::size_t final_iteration = 0;
};

struct BatchGradient {
  double mean_loss = 0.0;
  ParamGrad grad;  // mean over examples
};

// Per-example dropout streams are keyed by (seed, iteration, example index),
// so both kernels produce the same per-example terms regardless of thread
// scheduling. The serial kernel is the reference implementation.
BatchGradient batch_gradient_serial(const EmbeddingModel& m, const Dataset& d,
                                    std::span<const TrainingExample> batch, std::uint64_t seed,
                                    std::uint64_t iteration, bool dropout);
BatchGradient batch_gradient_parallel(const EmbeddingModel& m, const Dataset& d,
                                      std::span<const TrainingExample> batch, std::uint64_t seed,
                                      std::uint64_t iteration, bool dropout, bool ordered_reduction);

// The batch for an iteration depends only on (seed, iteration), which is what
// lets a resumed run reproduce an uninterrupted one.
std::vector<TrainingExample> batch_for_iteration(const Sampler& sampler, std::uint64_t seed,
                                                 std::uint64_t iteration, std::size_t batch_size);

// Effective sampler settings for a training config (variant, hard negatives).
SamplerConfig effective_sampler(const SamplerConfig& base, const TrainConfig& cfg);

// Runs iterations [start_iteration, cfg.iterations). Checkpoints go to
// checkpoint_dir/ckpt_<iter>.bin and checkpoint_dir/final.bin when a
// directory is given.
TrainResult train(const Dataset& d, EmbeddingModel model, const SamplerConfig& sampler_cfg,
                  const TrainConfig& cfg, const std::optional<std::filesystem::path>& checkpoint_dir = {},
                  std::size_t start_iteration = 0);

void write_train_log_csv(const TrainLog& log, std::size_t start_iteration, const std::filesystem::path& path);

}  // namespace tempctx
