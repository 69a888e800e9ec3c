#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "tempctx/dataset.hpp"

namespace tempctx {

// A state is addressed as (event, index within the event's chain).
struct StateRef {
  std::size_t event = 0;
  std::size_t state = 0;
  bool operator==(const StateRef&) const = default;
};

struct SynthSpec {
  std::size_t num_events = 5;
  std::size_t states_per_event = 6;
  std::size_t dim = 32;
  std::size_t num_sequences = 200;
  std::size_t seq_len = 40;
  double emission_noise = 0.1;
  double advance_prob = 0.3;
  // Per-sequence constant offset (lighting/camera stand-in) confined to a
  // fixed random subspace of this rank; scale 0 disables it.
  std::size_t nuisance_rank = 4;
  double nuisance_scale = 3.0;
  // Pairs of states from different events that share one emission prototype.
  std::vector<std::pair<StateRef, StateRef>> alias_pairs{{{0, 1}, {1, 1}}, {{2, 1}, {3, 1}}};
  std::uint64_t seed = 1;
};

void validate(const SynthSpec& spec);

// Every sequence picks an event uniformly (its label) and walks that event's
// left-to-right chain from state 0, emitting prototype + isotropic Gaussian
// noise, plus the sequence's nuisance offset. state_ids hold event * states_per_event + state.
Dataset generate(const SynthSpec& spec);

}  // namespace tempctx
