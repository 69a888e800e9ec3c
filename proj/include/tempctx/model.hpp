#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tempctx/rng.hpp"

namespace tempctx {

// Cross-channel local response normalization:
//   out_i = a_i / (k + alpha * sum_{|j-i| <= size/2} a_j^2)^beta
struct LrnParams {
  int size = 5;
  double k = 1.0;
  double alpha = 1e-4;
  double beta = 0.75;
};

enum class Mode { train, eval };

// f(x) = Dropout(LRN(ReLU(W x + b))).
//
// Parameters are held as doubles so that gradient checks can run at full
// precision; the trainer keeps them on the float32 grid so checkpoints
// round-trip exactly.
struct EmbeddingModel {
  std::size_t in_dim = 0;
  std::size_t emb_dim = 0;
  std::vector<double> weights;  // row-major, emb_dim x in_dim
  std::vector<double> bias;     // emb_dim
  LrnParams lrn;
  double dropout_rate = 0.5;

  double& w(std::size_t row, std::size_t col) { return weights[row * in_dim + col]; }
  double w(std::size_t row, std::size_t col) const { return weights[row * in_dim + col]; }
  std::size_t num_params() const { return weights.size() + bias.size(); }
};

// Gradient with respect to the model parameters, same layout as the model.
struct ParamGrad {
  std::vector<double> weights;
  std::vector<double> bias;

  ParamGrad() = default;
  explicit ParamGrad(const EmbeddingModel& m) : weights(m.weights.size(), 0.0), bias(m.bias.size(), 0.0) {}
  void zero();
  void add(const ParamGrad& other);
  void scale(double s);
};

struct ForwardTrace {
  std::vector<double> input;
  std::vector<double> pre_activation;
  std::vector<double> relu_out;
  std::vector<double> lrn_out;
  std::vector<double> dropout_scale;  // empty when dropout inactive; else 0 or 1/(1-p) per unit
  std::vector<double> output;
};

struct Backprop {
  std::vector<double> d_weights;
  std::vector<double> d_bias;
  std::vector<double> d_input;
};

// Xavier-uniform weights rounded to float32, zero bias, default LRN, dropout 0.5.
EmbeddingModel init_model(std::size_t in_dim, std::size_t emb_dim, std::uint64_t seed);

void validate(const EmbeddingModel& m);

// rng is required when mode == train and dropout_rate > 0.
ForwardTrace embed(const EmbeddingModel& m, std::span<const float> x, Mode mode, Rng* rng = nullptr);
ForwardTrace embed(const EmbeddingModel& m, std::span<const double> x, Mode mode, Rng* rng = nullptr);

// Eval-mode output only, no trace.
std::vector<double> embed_eval(const EmbeddingModel& m, std::span<const float> x);

std::vector<double> lrn_forward(std::span<const double> a, const LrnParams& p);
// Vector-Jacobian product of lrn_forward at a.
std::vector<double> lrn_backward(std::span<const double> a, const LrnParams& p, std::span<const double> d_out);

Backprop backward(const EmbeddingModel& m, const ForwardTrace& trace, std::span<const double> d_output);

// Adds dL/dW and dL/db into acc; skips the input gradient.
void backward_accumulate(const EmbeddingModel& m, const ForwardTrace& trace, std::span<const double> d_output,
                         ParamGrad& acc);

// Round every parameter to the nearest float32.
void snap_to_float(EmbeddingModel& m);

}  // namespace tempctx
