#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tempctx/dataset.hpp"
#include "tempctx/objective.hpp"
#include "tempctx/rng.hpp"

namespace tempctx {

struct SamplerConfig {
  std::size_t window = 2;  // T
  std::vector<std::size_t> strides{1, 2, 4};
  std::size_t negatives_per_target = 4;
  double hard_fraction = 0.5;  // 0 disables same-sequence negatives
  ContextVariant variant = ContextVariant::full;
};

void validate(const SamplerConfig& cfg);

// Draws training examples from an immutable dataset. Precomputes which
// (sequence, stride) pairs admit a complete context window; sequences with
// none are never targets but still supply cross-sequence negatives.
class Sampler {
 public:
  Sampler(const Dataset& d, SamplerConfig cfg);

  TrainingExample sample(Rng& rng) const;
  std::vector<TrainingExample> batch(std::size_t batch_size, Rng& rng) const;

  const SamplerConfig& config() const { return cfg_; }
  // Target range [first, last] for a sequence of n frames at stride r; empty
  // optional-like result signalled by first > last.
  std::pair<std::size_t, std::size_t> target_range(std::size_t n, std::size_t stride) const;

 private:
  struct Eligible {
    std::size_t seq;
    std::vector<std::size_t> strides;
  };

  const Dataset& data_;
  SamplerConfig cfg_;
  std::vector<Eligible> eligible_;
};

TrainingExample sample_example(const Dataset& d, const SamplerConfig& cfg, Rng& rng);
std::vector<TrainingExample> assemble_batch(const Dataset& d, const SamplerConfig& cfg, std::size_t batch_size,
                                            Rng& rng);

// Checks the structural contract of an example against its config; returns an
// empty string when it holds, otherwise a description of the violation.
std::string check_example(const Dataset& d, const SamplerConfig& cfg, const TrainingExample& ex);

}  // namespace tempctx
