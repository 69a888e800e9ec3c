#include "tempctx/synth.hpp"

#include <cmath>
#include <cstdio>

#include "tempctx/error.hpp"
#include "tempctx/rng.hpp"

namespace tempctx {

namespace {
constexpr std::uint64_t kPrototypeStream = 0x9007;
constexpr std::uint64_t kSequenceStream = 0x5e9;
constexpr std::uint64_t kNuisanceStream = 0x1167;

// Orthonormal basis of a random subspace (Gram-Schmidt on Gaussian vectors).
std::vector<std::vector<double>> random_subspace(std::size_t rank, std::size_t dim, Rng& rng) {
  std::vector<std::vector<double>> basis;
  while (basis.size() < rank) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.normal();
    for (const auto& u : basis) {
      double p = 0.0;
      for (std::size_t k = 0; k < dim; ++k) p += u[k] * v[k];
      for (std::size_t k = 0; k < dim; ++k) v[k] -= p * u[k];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-9) continue;
    for (auto& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  return basis;
}
}  // namespace

void validate(const SynthSpec& s) {
  if (s.num_events < 1 || s.states_per_event < 1 || s.dim < 1 || s.num_sequences < 1 || s.seq_len < 1)
    throw UsageError("synth: counts and dims must be positive");
  if (!(s.emission_noise >= 0.0)) throw UsageError("synth: emission_noise must be non-negative");
  if (!(s.nuisance_scale >= 0.0)) throw UsageError("synth: nuisance_scale must be non-negative");
  if (s.nuisance_scale > 0.0 && s.nuisance_rank > s.dim) throw UsageError("synth: nuisance_rank exceeds dim");
  if (!(s.advance_prob >= 0.0 && s.advance_prob <= 1.0)) throw UsageError("synth: advance_prob must lie in [0, 1]");
  for (const auto& [a, b] : s.alias_pairs) {
    if (a.event >= s.num_events || b.event >= s.num_events || a.state >= s.states_per_event ||
        b.state >= s.states_per_event)
      throw UsageError("synth: alias pair refers to a state that does not exist");
    if (a.event == b.event) throw UsageError("synth: aliased states must belong to different events");
  }
}

Dataset generate(const SynthSpec& spec) {
  validate(spec);
  const std::size_t S = spec.states_per_event;
  const std::size_t num_states = spec.num_events * S;

  Rng proto_rng = Rng::derive(spec.seed, {kPrototypeStream});
  std::vector<std::vector<float>> prototypes(num_states, std::vector<float>(spec.dim));
  for (auto& p : prototypes)
    for (auto& v : p) v = static_cast<float>(proto_rng.normal());
  for (const auto& [a, b] : spec.alias_pairs) prototypes[b.event * S + b.state] = prototypes[a.event * S + a.state];

  std::vector<std::vector<double>> nuisance_basis;
  if (spec.nuisance_scale > 0.0) {
    Rng basis_rng = Rng::derive(spec.seed, {kNuisanceStream});
    nuisance_basis = random_subspace(spec.nuisance_rank, spec.dim, basis_rng);
  }

  Dataset d;
  d.dim = spec.dim;
  d.sequences.resize(spec.num_sequences);
  const auto n = static_cast<std::ptrdiff_t>(spec.num_sequences);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    Rng rng = Rng::derive(spec.seed, {kSequenceStream, static_cast<std::uint64_t>(i)});
    auto& seq = d.sequences[i];
    char id[32];
    std::snprintf(id, sizeof id, "seq_%05td", i);
    seq.id = id;
    const auto event = static_cast<std::size_t>(rng.uniform_index(spec.num_events));
    seq.label = static_cast<int>(event);
    seq.num_frames = spec.seq_len;
    std::vector<double> offset(spec.dim, 0.0);
    for (const auto& u : nuisance_basis) {
      const double z = spec.nuisance_scale * rng.normal();
      for (std::size_t k = 0; k < spec.dim; ++k) offset[k] += z * u[k];
    }
    seq.features.resize(spec.seq_len * spec.dim);
    std::vector<std::int32_t> states(spec.seq_len);
    std::size_t state = 0;
    for (std::size_t t = 0; t < spec.seq_len; ++t) {
      if (t > 0 && state + 1 < S && rng.bernoulli(spec.advance_prob)) ++state;
      const std::size_t global = event * S + state;
      states[t] = static_cast<std::int32_t>(global);
      const auto& proto = prototypes[global];
      for (std::size_t k = 0; k < spec.dim; ++k)
        seq.features[t * spec.dim + k] = static_cast<float>(proto[k] + offset[k] + spec.emission_noise * rng.normal());
    }
    seq.state_ids = std::move(states);
  }
  return d;
}

}  // namespace tempctx
