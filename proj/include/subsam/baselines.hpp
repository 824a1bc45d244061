#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "subsam/rng.hpp"

namespace subsam {

// Reference samplers. Each returned index set includes element i
// independently with its probability.

// One coin flip per element; O(n) per query. Indices ascend.
std::vector<std::size_t> naive_query(const std::vector<double>& probs, RandomSource& src);

// Uniform probability p over n slots via iterated geometric skips; O(1 + mu)
// expected. p = 0 returns empty without consuming randomness. Indices ascend.
std::vector<std::size_t> geoss_query(std::size_t n, double p, RandomSource& src);

// Two-bucket hybrid: elements with probability at or below sqrt(mean prob)
// are swept geometrically at that threshold rate and thinned by p/threshold;
// the rest get per-element coin flips. Every update rebuilds the partition
// (O(n)), queries run in O(sqrt(mean) * n + |Y|) expected.
struct HybridState {
  std::vector<std::uint64_t> ids;
  std::vector<double> probs;  // parallel to ids
  std::unordered_map<std::uint64_t, std::size_t> pos;
  double mean_prob = 0.0;
  double threshold = 0.0;              // sqrt(mean_prob)
  std::vector<std::size_t> x_members;  // positions with prob <= threshold
  std::vector<std::size_t> y_members;  // the rest
};

// Per-query instrumentation of the geometric bucket (optional).
struct HybridQueryStats {
  std::vector<std::uint64_t> x_candidates;  // per x_members slot
  std::vector<std::uint64_t> x_accepts;
};

HybridState hybrid_build(const std::vector<std::uint64_t>& ids,
                         const std::vector<double>& probs);

void hybrid_query(const HybridState& st, RandomSource& src,
                  std::vector<std::uint64_t>& out, HybridQueryStats* stats = nullptr);

void hybrid_insert(HybridState& st, std::uint64_t id, double prob);
void hybrid_erase(HybridState& st, std::uint64_t id);
void hybrid_modify(HybridState& st, std::uint64_t id, double prob);

}  // namespace subsam
