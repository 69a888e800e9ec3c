#include "tempctx/objective.hpp"

#include "tempctx/error.hpp"

namespace tempctx {

namespace {

ContextVector mean_context(std::span<const std::vector<double>> embeddings, std::span<const std::size_t> idx,
                           ContextVariant variant) {
  ContextVector c;
  c.variant = variant;
  c.source_indices.assign(idx.begin(), idx.end());
  const std::size_t dim = embeddings.front().size();
  c.h.assign(dim, 0.0);
  for (const auto& e : embeddings) {
    if (e.size() != dim) throw DataError("context: embeddings have unequal dims");
    for (std::size_t i = 0; i < dim; ++i) c.h[i] += e[i];
  }
  const double inv = 1.0 / static_cast<double>(embeddings.size());
  for (auto& v : c.h) v *= inv;
  return c;
}

}  // namespace

const char* to_string(ContextVariant v) {
  switch (v) {
    case ContextVariant::full: return "full";
    case ContextVariant::no_future: return "no_future";
    case ContextVariant::no_temporal: return "no_temporal";
  }
  return "?";
}

ContextVariant parse_variant(const std::string& s) {
  if (s == "full") return ContextVariant::full;
  if (s == "no_future") return ContextVariant::no_future;
  if (s == "no_temporal") return ContextVariant::no_temporal;
  throw UsageError("unknown context variant '" + s + "' (expected full, no_future or no_temporal)");
}

ContextVector context_full(std::span<const std::vector<double>> embeddings, std::span<const std::size_t> idx) {
  if (embeddings.empty() || embeddings.size() % 2 != 0)
    throw DataError("context_full: expected 2T embeddings, got " + std::to_string(embeddings.size()));
  if (!idx.empty() && idx.size() != embeddings.size()) throw DataError("context_full: index count mismatch");
  return mean_context(embeddings, idx, ContextVariant::full);
}

ContextVector context_no_future(std::span<const std::vector<double>> embeddings,
                                std::span<const std::size_t> idx) {
  if (embeddings.empty()) throw DataError("context_no_future: expected T >= 1 embeddings");
  if (!idx.empty() && idx.size() != embeddings.size()) throw DataError("context_no_future: index count mismatch");
  return mean_context(embeddings, idx, ContextVariant::no_future);
}

std::size_t context_no_temporal(std::size_t n, std::size_t j, Rng& rng) {
  if (n < 2) throw DataError("context_no_temporal: sequence needs at least 2 frames");
  if (j >= n) throw DataError("context_no_temporal: target index out of range");
  const std::size_t k = rng.uniform_index(n - 1);
  return k < j ? k : k + 1;
}

LossTerm hinge_term(std::span<const double> f_t, std::span<const double> f_n, std::span<const double> h) {
  if (f_t.size() != f_n.size() || f_t.size() != h.size()) throw DataError("hinge_term: dimension mismatch");
  const std::size_t dim = h.size();
  LossTerm t;
  t.d_target.assign(dim, 0.0);
  t.d_negative.assign(dim, 0.0);
  t.d_context.assign(dim, 0.0);
  double margin = 0.0;
  for (std::size_t i = 0; i < dim; ++i) margin += (f_t[i] - f_n[i]) * h[i];
  const double loss = 1.0 - margin;
  if (loss <= 0.0) return t;
  t.loss = loss;
  t.active = true;
  for (std::size_t i = 0; i < dim; ++i) {
    t.d_target[i] = -h[i];
    t.d_negative[i] = h[i];
    t.d_context[i] = -(f_t[i] - f_n[i]);
  }
  return t;
}

ExampleLoss example_loss(const EmbeddingModel& m, const Dataset& d, const TrainingExample& ex, Mode mode,
                         Rng* rng) {
  if (ex.seq >= d.sequences.size()) throw DataError("example_loss: sequence index out of range");
  const auto& seq = d.sequences[ex.seq];
  auto check = [&](std::size_t s, std::size_t f) {
    if (s >= d.sequences.size() || f >= d.sequences[s].num_frames)
      throw DataError("example_loss: frame reference out of range in sequence '" + seq.id + "'");
  };
  check(ex.seq, ex.target_idx);
  if (ex.context_idxs.empty()) throw DataError("example_loss: example has no context frames");
  for (auto c : ex.context_idxs) check(ex.seq, c);
  for (const auto& n : ex.negatives) check(n.seq, n.frame);

  const ForwardTrace target = embed(m, d.frame(ex.seq, ex.target_idx), mode, rng);
  std::vector<ForwardTrace> context;
  context.reserve(ex.context_idxs.size());
  for (auto c : ex.context_idxs) context.push_back(embed(m, d.frame(ex.seq, c), mode, rng));

  std::vector<std::vector<double>> ctx_out;
  ctx_out.reserve(context.size());
  for (const auto& t : context) ctx_out.push_back(t.output);
  ContextVector h;
  switch (ex.variant) {
    case ContextVariant::full: h = context_full(ctx_out, ex.context_idxs); break;
    case ContextVariant::no_future: h = context_no_future(ctx_out, ex.context_idxs); break;
    case ContextVariant::no_temporal:
      if (ctx_out.size() != 1) throw DataError("example_loss: no_temporal expects one context frame");
      h = ContextVector{ctx_out.front(), ex.context_idxs, ContextVariant::no_temporal};
      break;
  }

  const std::size_t dim = m.emb_dim;
  ExampleLoss out;
  out.grad = ParamGrad(m);
  std::vector<double> d_target(dim, 0.0);
  std::vector<double> d_h(dim, 0.0);
  for (const auto& neg : ex.negatives) {
    const ForwardTrace nt = embed(m, d.frame(neg.seq, neg.frame), mode, rng);
    const LossTerm term = hinge_term(target.output, nt.output, h.h);
    if (!term.active) continue;
    out.loss += term.loss;
    for (std::size_t i = 0; i < dim; ++i) {
      d_target[i] += term.d_target[i];
      d_h[i] += term.d_context[i];
    }
    backward_accumulate(m, nt, term.d_negative, out.grad);
  }
  if (out.loss == 0.0) return out;

  backward_accumulate(m, target, d_target, out.grad);
  // h is a mean, so each context embedding receives d_h / count.
  const double share = 1.0 / static_cast<double>(context.size());
  std::vector<double> d_ctx(dim);
  for (std::size_t i = 0; i < dim; ++i) d_ctx[i] = d_h[i] * share;
  for (const auto& t : context) backward_accumulate(m, t, d_ctx, out.grad);
  return out;
}

}  // namespace tempctx
