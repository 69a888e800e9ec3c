#pragma once

// Independent reference computations used only by tests. None of these call
// into the code paths they are used to check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "tempctx/dataset.hpp"
#include "tempctx/model.hpp"
#include "tempctx/objective.hpp"

namespace tempctx::oracle {

// O(m^2) count of pairs ordered differently, scaled to 0-100.
inline double kendall_brute(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const std::size_t m = a.size();
  auto pos = [](const std::vector<std::size_t>& p, std::size_t item) {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] == item) return i;
    return p.size();
  };
  std::size_t discordant = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const bool in_a = pos(a, a[i]) < pos(a, a[j]);
      const bool in_b = pos(b, a[i]) < pos(b, a[j]);
      if (in_a != in_b) ++discordant;
    }
  return 100.0 * static_cast<double>(discordant) / (static_cast<double>(m) * static_cast<double>(m - 1) / 2.0);
}

// AP as the mean, over relevant items, of precision measured at that item's rank,
// computed by re-counting the prefix from scratch each time.
inline double ap_definitional(const std::vector<int>& rel) {
  std::vector<double> precisions;
  for (std::size_t k = 0; k < rel.size(); ++k) {
    if (!rel[k]) continue;
    int hits = 0;
    for (std::size_t i = 0; i <= k; ++i) hits += rel[i];
    precisions.push_back(static_cast<double>(hits) / static_cast<double>(k + 1));
  }
  double s = 0.0;
  for (double p : precisions) s += p;
  return s / static_cast<double>(precisions.size());
}

// Pairwise (Kahan-free) mean computed column by column in long double.
inline std::vector<double> mean_brute(const std::vector<std::vector<double>>& xs) {
  std::vector<double> out(xs.front().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    long double s = 0.0L;
    for (const auto& x : xs) s += x[i];
    out[i] = static_cast<double>(s / static_cast<long double>(xs.size()));
  }
  return out;
}

// Central differences of f over every entry of params.
inline std::vector<double> central_diff(std::vector<double>& params, const std::function<double()>& f,
                                        double h = 1e-4) {
  std::vector<double> g(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    const double up = f();
    params[i] = keep - h;
    const double down = f();
    params[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

struct GradCheck {
  double max_rel = 0.0;   // over components with magnitude above the floor
  double norm_rel = 0.0;  // ||a - n|| / max(||a||, ||n||)
};

inline GradCheck compare_grads(const std::vector<double>& analytic, const std::vector<double>& numeric,
                               double floor = 1e-7) {
  GradCheck c;
  double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i], n = numeric[i];
    diff2 += (a - n) * (a - n);
    a2 += a * a;
    n2 += n * n;
    const double scale = std::max(std::abs(a), std::abs(n));
    if (scale > floor) c.max_rel = std::max(c.max_rel, std::abs(a - n) / scale);
  }
  const double denom = std::sqrt(std::max(a2, n2));
  c.norm_rel = denom > 0.0 ? std::sqrt(diff2) / denom : 0.0;
  return c;
}

// Plain-loop LRN, written from the formula independently of the library.
inline std::vector<double> lrn_reference(const std::vector<double>& a, int size, double k, double alpha, double beta) {
  const int n = static_cast<int>(a.size());
  std::vector<double> out(a.size());
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = i - size / 2; j <= i + size / 2; ++j)
      if (j >= 0 && j < n) s += a[j] * a[j];
    out[i] = a[i] / std::pow(k + alpha * s, beta);
  }
  return out;
}

}  // namespace tempctx::oracle
