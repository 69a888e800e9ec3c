#include "tempctx/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tempctx/error.hpp"

namespace tempctx {

namespace {

struct LrnWindow {
  std::size_t lo, hi;  // inclusive
};

LrnWindow window(std::size_t i, std::size_t n, int size) {
  const auto half = static_cast<std::size_t>(size / 2);
  return {i >= half ? i - half : 0, std::min(n - 1, i + half)};
}

// D_i = k + alpha * sum_{window(i)} a_j^2
std::vector<double> lrn_denominators(std::span<const double> a, const LrnParams& p) {
  const std::size_t n = a.size();
  std::vector<double> denom(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = window(i, n, p.size);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += a[j] * a[j];
    denom[i] = p.k + p.alpha * s;
  }
  return denom;
}

template <typename T>
ForwardTrace embed_impl(const EmbeddingModel& m, std::span<const T> x, Mode mode, Rng* rng) {
  if (x.size() != m.in_dim)
    throw DataError("embed: input has dim " + std::to_string(x.size()) + ", model expects " +
                    std::to_string(m.in_dim));
  ForwardTrace t;
  t.input.assign(x.begin(), x.end());
  t.pre_activation.resize(m.emb_dim);
  t.relu_out.resize(m.emb_dim);
  for (std::size_t r = 0; r < m.emb_dim; ++r) {
    const double* row = m.weights.data() + r * m.in_dim;
    double acc = m.bias[r];
    for (std::size_t c = 0; c < m.in_dim; ++c) acc += row[c] * t.input[c];
    t.pre_activation[r] = acc;
    t.relu_out[r] = acc > 0.0 ? acc : 0.0;
  }
  t.lrn_out = lrn_forward(t.relu_out, m.lrn);

  if (mode == Mode::train && m.dropout_rate > 0.0) {
    if (rng == nullptr) throw UsageError("embed: train mode with dropout needs an rng");
    const double keep_scale = 1.0 / (1.0 - m.dropout_rate);
    t.dropout_scale.resize(m.emb_dim);
    t.output.resize(m.emb_dim);
    for (std::size_t r = 0; r < m.emb_dim; ++r) {
      t.dropout_scale[r] = rng->bernoulli(m.dropout_rate) ? 0.0 : keep_scale;
      t.output[r] = t.lrn_out[r] * t.dropout_scale[r];
    }
  } else {
    t.output = t.lrn_out;
  }
  return t;
}

// dL/d(pre_activation) from dL/d(output).
std::vector<double> grad_pre_activation(const EmbeddingModel& m, const ForwardTrace& t,
                                        std::span<const double> d_output) {
  if (d_output.size() != m.emb_dim || t.relu_out.size() != m.emb_dim || t.input.size() != m.in_dim)
    throw DataError("backward: trace or gradient shape does not match the model");
  std::vector<double> d_lrn(d_output.begin(), d_output.end());
  if (!t.dropout_scale.empty())
    for (std::size_t r = 0; r < m.emb_dim; ++r) d_lrn[r] *= t.dropout_scale[r];
  auto d_pre = lrn_backward(t.relu_out, m.lrn, d_lrn);
  for (std::size_t r = 0; r < m.emb_dim; ++r)
    if (t.pre_activation[r] <= 0.0) d_pre[r] = 0.0;
  return d_pre;
}

}  // namespace

void ParamGrad::zero() {
  std::fill(weights.begin(), weights.end(), 0.0);
  std::fill(bias.begin(), bias.end(), 0.0);
}

void ParamGrad::add(const ParamGrad& o) {
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] += o.weights[i];
  for (std::size_t i = 0; i < bias.size(); ++i) bias[i] += o.bias[i];
}

void ParamGrad::scale(double s) {
  for (auto& v : weights) v *= s;
  for (auto& v : bias) v *= s;
}

EmbeddingModel init_model(std::size_t in_dim, std::size_t emb_dim, std::uint64_t seed) {
  if (in_dim == 0 || emb_dim == 0) throw UsageError("init_model: dims must be positive");
  EmbeddingModel m;
  m.in_dim = in_dim;
  m.emb_dim = emb_dim;
  m.weights.resize(in_dim * emb_dim);
  m.bias.assign(emb_dim, 0.0);
  const double a = std::sqrt(6.0 / static_cast<double>(in_dim + emb_dim));
  Rng rng(seed);
  for (auto& w : m.weights) {
    // Round toward zero so the float value stays inside [-a, a].
    const double u = rng.uniform(-a, a);
    float f = static_cast<float>(u);
    if (std::abs(static_cast<double>(f)) > a) f = std::nextafter(f, 0.0f);
    w = f;
  }
  return m;
}

void validate(const EmbeddingModel& m) {
  if (m.in_dim == 0 || m.emb_dim == 0) throw DataError("model dims must be positive");
  if (m.weights.size() != m.in_dim * m.emb_dim || m.bias.size() != m.emb_dim)
    throw DataError("model parameter shapes do not match dims");
  if (m.lrn.size < 1 || m.lrn.size % 2 == 0) throw DataError("lrn size must be odd and positive");
  if (!(m.lrn.k > 0.0)) throw DataError("lrn k must be positive");
  if (!(m.dropout_rate >= 0.0 && m.dropout_rate < 1.0)) throw DataError("dropout rate must lie in [0, 1)");
  for (double v : m.weights)
    if (!std::isfinite(v)) throw NumericalError("model has a non-finite weight");
  for (double v : m.bias)
    if (!std::isfinite(v)) throw NumericalError("model has a non-finite bias");
}

ForwardTrace embed(const EmbeddingModel& m, std::span<const float> x, Mode mode, Rng* rng) {
  return embed_impl(m, x, mode, rng);
}

ForwardTrace embed(const EmbeddingModel& m, std::span<const double> x, Mode mode, Rng* rng) {
  return embed_impl(m, x, mode, rng);
}

std::vector<double> embed_eval(const EmbeddingModel& m, std::span<const float> x) {
  return embed_impl(m, x, Mode::eval, nullptr).output;
}

std::vector<double> lrn_forward(std::span<const double> a, const LrnParams& p) {
  const auto denom = lrn_denominators(a, p);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * std::pow(denom[i], -p.beta);
  return out;
}

// With D_i the denominator and g the upstream gradient:
//   dL/da_m = g_m D_m^-beta - 2 alpha beta a_m sum_{i in window(m)} g_i a_i D_i^(-beta-1)
// (windows are symmetric, so m in window(i) iff i in window(m)).
std::vector<double> lrn_backward(std::span<const double> a, const LrnParams& p, std::span<const double> d_out) {
  const std::size_t n = a.size();
  const auto denom = lrn_denominators(a, p);
  std::vector<double> cross(n);
  for (std::size_t i = 0; i < n; ++i) cross[i] = d_out[i] * a[i] * std::pow(denom[i], -p.beta - 1.0);
  std::vector<double> d_a(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto [lo, hi] = window(m, n, p.size);
    double s = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) s += cross[i];
    d_a[m] = d_out[m] * std::pow(denom[m], -p.beta) - 2.0 * p.alpha * p.beta * a[m] * s;
  }
  return d_a;
}

Backprop backward(const EmbeddingModel& m, const ForwardTrace& t, std::span<const double> d_output) {
  const auto d_pre = grad_pre_activation(m, t, d_output);
  Backprop g;
  g.d_weights.assign(m.weights.size(), 0.0);
  g.d_bias = d_pre;
  g.d_input.assign(m.in_dim, 0.0);
  for (std::size_t r = 0; r < m.emb_dim; ++r) {
    if (d_pre[r] == 0.0) continue;
    const double* row = m.weights.data() + r * m.in_dim;
    double* grow = g.d_weights.data() + r * m.in_dim;
    for (std::size_t c = 0; c < m.in_dim; ++c) {
      grow[c] = d_pre[r] * t.input[c];
      g.d_input[c] += d_pre[r] * row[c];
    }
  }
  return g;
}

void backward_accumulate(const EmbeddingModel& m, const ForwardTrace& t, std::span<const double> d_output,
                         ParamGrad& acc) {
  const auto d_pre = grad_pre_activation(m, t, d_output);
  for (std::size_t r = 0; r < m.emb_dim; ++r) {
    if (d_pre[r] == 0.0) continue;
    acc.bias[r] += d_pre[r];
    double* grow = acc.weights.data() + r * m.in_dim;
    for (std::size_t c = 0; c < m.in_dim; ++c) grow[c] += d_pre[r] * t.input[c];
  }
}

void snap_to_float(EmbeddingModel& m) {
  for (auto& v : m.weights) v = static_cast<float>(v);
  for (auto& v : m.bias) v = static_cast<float>(v);
}

}  // namespace tempctx
