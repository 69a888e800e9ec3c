#include "tempctx/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tempctx/error.hpp"

namespace tempctx {

void validate(const SamplerConfig& cfg) {
  if (cfg.window < 1) throw UsageError("sampler: window T must be >= 1");
  if (cfg.strides.empty()) throw UsageError("sampler: strides must be non-empty");
  std::set<std::size_t> seen;
  for (auto r : cfg.strides) {
    if (r < 1) throw UsageError("sampler: strides must be positive");
    if (!seen.insert(r).second) throw UsageError("sampler: strides must be distinct");
  }
  if (cfg.negatives_per_target < 1) throw UsageError("sampler: negatives_per_target must be >= 1");
  if (!(cfg.hard_fraction >= 0.0 && cfg.hard_fraction <= 1.0))
    throw UsageError("sampler: hard_fraction must lie in [0, 1]");
}

Sampler::Sampler(const Dataset& d, SamplerConfig cfg) : data_(d), cfg_(std::move(cfg)) {
  validate(cfg_);
  if (d.sequences.size() < 2) throw DataError("sampler: dataset needs at least 2 sequences");
  for (std::size_t s = 0; s < d.sequences.size(); ++s) {
    Eligible e{s, {}};
    for (auto r : cfg_.strides) {
      const auto [lo, hi] = target_range(d.sequences[s].num_frames, r);
      if (lo <= hi) e.strides.push_back(r);
    }
    if (!e.strides.empty()) eligible_.push_back(std::move(e));
  }
  if (eligible_.empty())
    throw DataError("sampler: no sequence admits a complete context window at any stride");
}

std::pair<std::size_t, std::size_t> Sampler::target_range(std::size_t n, std::size_t stride) const {
  const std::size_t reach = cfg_.window * stride;
  switch (cfg_.variant) {
    case ContextVariant::full:
      if (n < 2 * reach + 1) return {1, 0};
      return {reach, n - 1 - reach};
    case ContextVariant::no_future:
      if (n < reach + 1) return {1, 0};
      return {reach, n - 1};
    case ContextVariant::no_temporal:
      if (n < 2) return {1, 0};
      return {0, n - 1};
  }
  return {1, 0};
}

TrainingExample Sampler::sample(Rng& rng) const {
  const auto& e = eligible_[rng.uniform_index(eligible_.size())];
  const std::size_t n = data_.sequences[e.seq].num_frames;

  TrainingExample ex;
  ex.seq = e.seq;
  ex.variant = cfg_.variant;
  ex.stride = e.strides[rng.uniform_index(e.strides.size())];
  const auto [lo, hi] = target_range(n, ex.stride);
  ex.target_idx = lo + rng.uniform_index(hi - lo + 1);

  const std::size_t j = ex.target_idx;
  const std::size_t r = ex.stride;
  const std::size_t T = cfg_.window;
  switch (cfg_.variant) {
    case ContextVariant::full:
      for (std::size_t t = T; t >= 1; --t) ex.context_idxs.push_back(j - t * r);
      for (std::size_t t = 1; t <= T; ++t) ex.context_idxs.push_back(j + t * r);
      break;
    case ContextVariant::no_future:
      for (std::size_t t = T; t >= 1; --t) ex.context_idxs.push_back(j - t * r);
      break;
    case ContextVariant::no_temporal:
      ex.context_idxs.push_back(context_no_temporal(n, j, rng));
      break;
  }

  // Same-sequence pool: indices strictly outside [j - T*r, j + T*r]. The
  // bag-of-frames context spans the whole sequence, so its pool is empty.
  const std::size_t reach = T * r;
  const bool bag = cfg_.variant == ContextVariant::no_temporal;
  const std::size_t left = !bag && j > reach ? j - reach : 0;
  const std::size_t right = !bag && n - 1 > j + reach ? n - 1 - j - reach : 0;
  const std::size_t pool = left + right;
  const std::size_t wanted_hard =
      static_cast<std::size_t>(std::ceil(cfg_.hard_fraction * static_cast<double>(cfg_.negatives_per_target)));
  const std::size_t hard = std::min({wanted_hard, pool, cfg_.negatives_per_target});

  // Floyd's algorithm: a uniform subset of `hard` distinct pool positions.
  std::vector<std::size_t> picks;
  for (std::size_t i = pool - hard; i < pool; ++i) {
    const std::size_t t = rng.uniform_index(i + 1);
    picks.push_back(std::find(picks.begin(), picks.end(), t) == picks.end() ? t : i);
  }
  for (auto p : picks) ex.negatives.push_back({e.seq, p < left ? p : j + reach + 1 + (p - left)});

  const std::size_t num_seqs = data_.sequences.size();
  while (ex.negatives.size() < cfg_.negatives_per_target) {
    std::size_t s = rng.uniform_index(num_seqs - 1);
    if (s >= e.seq) ++s;
    ex.negatives.push_back({s, rng.uniform_index(data_.sequences[s].num_frames)});
  }
  return ex;
}

std::vector<TrainingExample> Sampler::batch(std::size_t batch_size, Rng& rng) const {
  if (batch_size < 1) throw UsageError("batch size must be >= 1");
  std::vector<TrainingExample> out;
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) out.push_back(sample(rng));
  return out;
}

TrainingExample sample_example(const Dataset& d, const SamplerConfig& cfg, Rng& rng) {
  return Sampler(d, cfg).sample(rng);
}

std::vector<TrainingExample> assemble_batch(const Dataset& d, const SamplerConfig& cfg, std::size_t batch_size,
                                            Rng& rng) {
  return Sampler(d, cfg).batch(batch_size, rng);
}

std::string check_example(const Dataset& d, const SamplerConfig& cfg, const TrainingExample& ex) {
  if (ex.seq >= d.sequences.size()) return "sequence out of range";
  const std::size_t n = d.sequences[ex.seq].num_frames;
  const std::size_t j = ex.target_idx;
  const std::size_t reach = cfg.window * ex.stride;
  if (j >= n) return "target out of range";
  if (std::find(cfg.strides.begin(), cfg.strides.end(), ex.stride) == cfg.strides.end()) return "unknown stride";

  std::vector<std::size_t> expect;
  switch (ex.variant) {
    case ContextVariant::full:
      if (j < reach || j + reach >= n) return "full window does not fit";
      for (std::size_t t = cfg.window; t >= 1; --t) expect.push_back(j - t * ex.stride);
      for (std::size_t t = 1; t <= cfg.window; ++t) expect.push_back(j + t * ex.stride);
      if (ex.context_idxs != expect) return "context indices differ from j +- t*stride";
      break;
    case ContextVariant::no_future:
      if (j < reach) return "past window does not fit";
      for (std::size_t t = cfg.window; t >= 1; --t) expect.push_back(j - t * ex.stride);
      if (ex.context_idxs != expect) return "context indices differ from j - t*stride";
      break;
    case ContextVariant::no_temporal:
      if (ex.context_idxs.size() != 1 || ex.context_idxs[0] == j || ex.context_idxs[0] >= n)
        return "bag-of-frames context must be one other frame";
      break;
  }
  if (ex.negatives.size() != cfg.negatives_per_target) return "wrong number of negatives";
  for (const auto& neg : ex.negatives) {
    if (neg.seq >= d.sequences.size() || neg.frame >= d.sequences[neg.seq].num_frames)
      return "negative out of range";
    if (neg.seq == ex.seq) {
      if (ex.variant == ContextVariant::no_temporal) return "same-sequence negative for a bag-of-frames context";
      const std::size_t dist = neg.frame > j ? neg.frame - j : j - neg.frame;
      if (dist <= reach) return "hard negative inside the context window";
    }
  }
  return {};
}

}  // namespace tempctx
