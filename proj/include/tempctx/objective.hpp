#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tempctx/dataset.hpp"
#include "tempctx/model.hpp"
#include "tempctx/rng.hpp"

namespace tempctx {

enum class ContextVariant { full, no_future, no_temporal };

const char* to_string(ContextVariant v);
ContextVariant parse_variant(const std::string& s);

struct ContextVector {
  std::vector<double> h;
  std::vector<std::size_t> source_indices;
  ContextVariant variant = ContextVariant::full;
};

// Mean of the 2T embeddings around the target, ordered [j-T..j-1, j+1..j+T].
ContextVector context_full(std::span<const std::vector<double>> embeddings,
                           std::span<const std::size_t> source_indices = {});
// Mean of the T past embeddings.
ContextVector context_no_future(std::span<const std::vector<double>> embeddings,
                                std::span<const std::size_t> source_indices = {});
// Uniform frame index k != target_idx; its embedding is the context.
std::size_t context_no_temporal(std::size_t sequence_len, std::size_t target_idx, Rng& rng);

struct LossTerm {
  double loss = 0.0;
  bool active = false;
  std::vector<double> d_target;
  std::vector<double> d_negative;
  std::vector<double> d_context;
};

// max(0, 1 - (f_target - f_negative) . h) and its subgradients; the kink
// (margin exactly 1) takes the zero subgradient.
LossTerm hinge_term(std::span<const double> f_target, std::span<const double> f_negative,
                    std::span<const double> h);

struct FrameRef {
  std::size_t seq = 0;
  std::size_t frame = 0;
  bool operator==(const FrameRef&) const = default;
};

struct TrainingExample {
  std::size_t seq = 0;  // index into Dataset::sequences
  std::size_t target_idx = 0;
  std::size_t stride = 1;
  std::vector<std::size_t> context_idxs;  // full: [j-T*r..j-r, j+r..j+T*r]; no_future: [j-T*r..j-r]
  std::vector<FrameRef> negatives;
  ContextVariant variant = ContextVariant::full;
};

struct ExampleLoss {
  double loss = 0.0;
  ParamGrad grad;
};

// Sum of hinge terms over the example's negatives, with gradients taken
// through the target, negative, and context embeddings. rng drives dropout in
// train mode.
ExampleLoss example_loss(const EmbeddingModel& m, const Dataset& d, const TrainingExample& ex, Mode mode,
                         Rng* rng);

}  // namespace tempctx
