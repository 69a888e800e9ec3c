#include <algorithm>
#include <numeric>
#include <utility>

#include "tempctx/error.hpp"
#include "tempctx/eval.hpp"

namespace tempctx {

namespace {

// Inversions of v via merge sort; v is left sorted.
std::uint64_t count_inversions(std::vector<std::size_t>& v, std::vector<std::size_t>& scratch, std::size_t lo,
                               std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += mid - i;
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace

std::vector<std::size_t> recover_order_greedy(std::span<const std::vector<double>> emb) {
  const std::size_t m = emb.size();
  if (m < 3) throw DataError("order recovery needs at least 3 frames");
  std::vector<std::size_t> order{0, 1};
  std::vector<bool> placed(m, false);
  placed[0] = placed[1] = true;
  std::vector<double> query(emb[0].size());
  while (order.size() < m) {
    const auto& a = emb[order[order.size() - 2]];
    const auto& b = emb[order.back()];
    for (std::size_t i = 0; i < query.size(); ++i) query[i] = 0.5 * (a[i] + b[i]);
    std::size_t best = m;
    double best_sim = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (placed[k]) continue;
      const double sim = cosine(query, emb[k]);
      if (best == m || sim > best_sim) {
        best = k;
        best_sim = sim;
      }
    }
    placed[best] = true;
    order.push_back(best);
  }
  return order;
}

double kendall_tau_distance(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  const std::size_t m = a.size();
  if (m < 2 || b.size() != m) throw DataError("kendall tau: need two permutations of the same m >= 2 items");
  // Rank of each item in b, found through a sorted (item, position) table.
  std::vector<std::pair<std::size_t, std::size_t>> pos_b(m);
  for (std::size_t i = 0; i < m; ++i) pos_b[i] = {b[i], i};
  std::sort(pos_b.begin(), pos_b.end());
  for (std::size_t i = 1; i < m; ++i)
    if (pos_b[i].first == pos_b[i - 1].first) throw DataError("kendall tau: repeated item");

  std::vector<std::size_t> seq(m);
  std::vector<bool> used(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    const auto it = std::lower_bound(pos_b.begin(), pos_b.end(), std::pair<std::size_t, std::size_t>{a[i], 0});
    if (it == pos_b.end() || it->first != a[i]) throw DataError("kendall tau: lists hold different items");
    if (used[it->second]) throw DataError("kendall tau: repeated item");
    used[it->second] = true;
    seq[i] = it->second;
  }
  std::vector<std::size_t> scratch(m);
  const std::uint64_t discordant = count_inversions(seq, scratch, 0, m);
  const double pairs = static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
  return 100.0 * static_cast<double>(discordant) / pairs;
}

EvalReport order_recovery_eval(const Dataset& d, const Embedder& e, std::size_t frames_per_video) {
  if (frames_per_video < 4) throw UsageError("order recovery needs at least 4 frames per video");
  std::vector<std::size_t> videos;
  for (std::size_t s = 0; s < d.sequences.size(); ++s)
    if (d.sequences[s].num_frames >= frames_per_video) videos.push_back(s);
  if (videos.empty())
    throw DataError("order recovery: no video has at least " + std::to_string(frames_per_video) + " frames");

  EvalReport r;
  r.task = "order_recovery";
  r.per_query.resize(videos.size());
  const auto nv = static_cast<std::ptrdiff_t>(videos.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t vi = 0; vi < nv; ++vi) {
    const std::size_t s = videos[vi];
    const auto idx = uniform_indices(d.sequences[s].num_frames, frames_per_video);
    std::vector<std::vector<double>> emb;
    emb.reserve(idx.size());
    for (auto f : idx) emb.push_back(e(d.frame(s, f)));
    const auto recovered = recover_order_greedy(emb);
    // Frames 0 and 1 are handed to the method, so only the retrieved tail is scored.
    const std::span<const std::size_t> tail(recovered.begin() + 2, recovered.end());
    std::vector<std::size_t> truth(tail.size());
    std::iota(truth.begin(), truth.end(), std::size_t{2});
    r.per_query[vi] = {d.sequences[s].id, kendall_tau_distance(tail, truth)};
  }
  finalize(r);
  return r;
}

}  // namespace tempctx
