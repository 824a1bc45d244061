#pragma once

#include <cstdint>

namespace subsam {

// Work counters exposed by the hierarchical samplers. All fields are monotone
// totals; meter a single operation by snapshotting before and subtracting.
//
// rng_draws counts index-selection draws only: table row picks,
// first-candidate draws and geometric skips. Acceptance coin flips are
// visible through candidates_generated — every surfaced candidate costs at
// most one uniform draw, and trivial cases (probability 0, or probability
// equal to the group bound) decide without consuming randomness. Raw
// generator consumption is available separately via
// RandomSource::invocations().
struct Counters {
  std::uint64_t rng_draws = 0;
  std::uint64_t candidates_generated = 0;
  std::uint64_t acceptances = 0;
  std::uint64_t groups_visited = 0;
  std::uint64_t slot_writes = 0;

  Counters operator-(const Counters& o) const {
    return Counters{rng_draws - o.rng_draws,
                    candidates_generated - o.candidates_generated,
                    acceptances - o.acceptances,
                    groups_visited - o.groups_visited,
                    slot_writes - o.slot_writes};
  }

  void reset() { *this = Counters{}; }
};

}  // namespace subsam
