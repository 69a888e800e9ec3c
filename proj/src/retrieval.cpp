#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>

#include "tempctx/error.hpp"
#include "tempctx/eval.hpp"

namespace tempctx {

double cosine(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("cosine: dimension mismatch");
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xy += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (xx == 0.0 || yy == 0.0) return 0.0;
  return std::clamp(xy / (std::sqrt(xx) * std::sqrt(yy)), -1.0, 1.0);
}

double average_precision(std::span<const bool> ranked) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (!ranked[k]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  if (hits == 0) throw DataError("average_precision: no relevant items");
  return sum / static_cast<double>(hits);
}

EvalReport event_retrieval_map(const Dataset& d, const Embedder& e, std::size_t frames_per_video) {
  std::map<int, std::size_t> class_sizes;
  for (const auto& s : d.sequences) {
    if (!s.label) throw DataError("event retrieval: sequence '" + s.id + "' has no label");
    ++class_sizes[*s.label];
  }
  for (const auto& [label, count] : class_sizes)
    if (count < 2)
      throw DataError("event retrieval: class " + std::to_string(label) + " has a single member");
  if (d.sequences.size() < 2) throw DataError("event retrieval: needs at least 2 videos");

  const std::size_t n = d.sequences.size();
  std::vector<std::vector<double>> video(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto idx = uniform_indices(d.sequences[s].num_frames, frames_per_video);
    video[s] = mean_embedding(d, s, idx, e);
  }

  EvalReport r;
  r.task = "event_retrieval";
  r.per_query.resize(n);
  const auto nq = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t qi = 0; qi < nq; ++qi) {
    const auto q = static_cast<std::size_t>(qi);
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(n - 1);
    for (std::size_t s = 0; s < n; ++s)
      if (s != q) ranked.emplace_back(cosine(video[q], video[s]), s);
    std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return d.sequences[a.second].id < d.sequences[b.second].id;
    });
    auto rel = std::make_unique<bool[]>(ranked.size());
    for (std::size_t k = 0; k < ranked.size(); ++k)
      rel[k] = *d.sequences[ranked[k].second].label == *d.sequences[q].label;
    r.per_query[q] = {d.sequences[q].id, average_precision({rel.get(), ranked.size()})};
  }
  finalize(r);
  return r;
}

std::optional<TemporalSplit> temporal_split(std::size_t n, std::size_t min_len) {
  if (n < min_len || n < 4) return std::nullopt;
  TemporalSplit t;
  t.context = uniform_indices(n, 4);
  const std::size_t c1 = t.context[1], c2 = t.context[2];
  if (c2 < c1 + 4) return std::nullopt;  // need >= 3 frames strictly inside
  const std::size_t lo = c1 + 1, hi = c2 - 1;
  for (auto k : uniform_indices(hi - lo + 1, 3)) t.positives.push_back(lo + k);

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < c1; ++i) pool.push_back(i);
  for (std::size_t i = c2 + 1; i < n; ++i) pool.push_back(i);
  std::erase_if(pool, [&](std::size_t i) {
    return std::find(t.context.begin(), t.context.end(), i) != t.context.end();
  });
  if (pool.empty()) return std::nullopt;
  for (auto k : uniform_indices(pool.size(), 12)) {
    const std::size_t idx = pool[k];
    if (t.negatives.empty() || t.negatives.back() != idx) t.negatives.push_back(idx);
  }
  return t;
}

EvalReport temporal_retrieval_map(const Dataset& d, const Embedder& e, std::size_t min_len) {
  std::vector<std::size_t> queries;
  std::vector<TemporalSplit> splits;
  for (std::size_t s = 0; s < d.sequences.size(); ++s) {
    if (auto t = temporal_split(d.sequences[s].num_frames, min_len)) {
      queries.push_back(s);
      splits.push_back(std::move(*t));
    }
  }
  if (queries.empty())
    throw DataError("temporal retrieval: no video has at least " + std::to_string(min_len) + " frames");

  const FrameEmbeddings emb = embed_all_parallel(d, e);

  EvalReport r;
  r.task = "temporal_retrieval";
  r.per_query.resize(queries.size());
  const auto nq = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t qi = 0; qi < nq; ++qi) {
    const std::size_t v = queries[qi];
    const TemporalSplit& t = splits[qi];
    std::vector<double> query(emb[v][0].size(), 0.0);
    for (auto c : t.context)
      for (std::size_t i = 0; i < query.size(); ++i) query[i] += emb[v][c][i] / 4.0;

    // Candidates in (sequence, frame) order, which is also the tie order.
    struct Candidate {
      double score;
      std::size_t seq, frame;
      bool relevant;
    };
    std::vector<Candidate> cand;
    cand.reserve(t.positives.size() + t.negatives.size() + d.total_frames());
    for (std::size_t s = 0; s < d.sequences.size(); ++s) {
      if (s == v) {
        std::vector<std::pair<std::size_t, bool>> own;
        for (auto p : t.positives) own.emplace_back(p, true);
        for (auto n : t.negatives) own.emplace_back(n, false);
        std::sort(own.begin(), own.end());
        for (const auto& [f, rel] : own) cand.push_back({cosine(query, emb[v][f]), s, f, rel});
      } else {
        for (std::size_t f = 0; f < emb[s].size(); ++f) cand.push_back({cosine(query, emb[s][f]), s, f, false});
      }
    }
    std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    auto rel = std::make_unique<bool[]>(cand.size());
    for (std::size_t k = 0; k < cand.size(); ++k) rel[k] = cand[k].relevant;
    r.per_query[qi] = {d.sequences[v].id, average_precision({rel.get(), cand.size()})};
  }
  finalize(r);
  return r;
}

}  // namespace tempctx
