#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subsam/counters.hpp"
#include "subsam/rng.hpp"

namespace subsam {

// Bucket index for probability p among group_count dyadic ranges: bucket k
// holds p in (2^-k, 2^(-k+1)] for k < group_count, and the last bucket
// catches everything at or below its lower bound, including p = 0.
// Computed from the binary exponent so powers of two land exactly:
// p = 2^-k belongs to bucket k+1.
int group_index_of(double p, int group_count);

// Probability that a bucket with `size` slots, each an independent candidate
// at the bucket bound q_k = 2^(1-k), yields at least one candidate:
// 1 - (1 - q_k)^size, evaluated via expm1/log1p for stability.
double group_success_prob(int k, std::size_t size);

struct ElementSlot {
  std::uint64_t id;
  double prob;
};

// One level of the sampling hierarchy: elements bucketed by probability
// range. Buckets are arrays with append-insert and swap-with-last removal;
// an id -> (bucket, offset) index makes every update O(1). The number of
// buckets is fixed up front from a declared capacity, so bucket boundaries
// never move during operation.
class GroupedLevel {
 public:
  explicit GroupedLevel(std::uint64_t capacity);

  int group_count() const { return k_count_; }
  std::uint64_t capacity() const { return capacity_; }
  std::size_t size() const { return index_.size(); }

  // Returns the bucket the element landed in. Throws on duplicate id or
  // probability outside [0, 1].
  int insert(std::uint64_t id, double prob, Counters& c);

  // Swap-with-last removal; returns the bucket that shrank. Throws on
  // unknown id.
  int erase(std::uint64_t id, Counters& c);

  // Rewrites the stored probability of id. Same-bucket rewrites are a single
  // in-place slot write and return {k, k}; otherwise the element moves and
  // the result is {old bucket, new bucket}.
  std::pair<int, int> update_prob(std::uint64_t id, double prob, Counters& c);

  bool contains(std::uint64_t id) const { return index_.count(id) != 0; }
  double prob_of(std::uint64_t id) const;

  double group_bound(int k) const;                       // q_k = 2^(1-k)
  double group_prob(int k) const;                        // cached success prob
  std::size_t group_size(int k) const;
  const std::vector<ElementSlot>& group_slots(int k) const;

  // Running compensated sum of stored probabilities, and an O(n) reference
  // recomputation for consistency checks.
  double mass() const { return mass_; }
  double recompute_mass() const;

  // Bounded geometric sweep over bucket k, conditioned on at least one
  // candidate: each landed slot is accepted with prob/q_k and appended to
  // out. Requires a non-empty bucket.
  void sample_within(int k, RandomSource& src, std::vector<std::uint64_t>& out,
                     Counters& c) const;

 private:
  struct Pos {
    std::uint32_t group;   // 1-based bucket index
    std::uint32_t offset;  // position inside the bucket array
  };
  struct IdHash {
    std::size_t operator()(std::uint64_t x) const {
      return static_cast<std::size_t>(x * 0x9E3779B97F4A7C15ull);
    }
  };

  void check_group(int k) const;
  void mass_add(double x);

  int k_count_;
  std::uint64_t capacity_;
  std::vector<std::vector<ElementSlot>> slots_;  // bucket k lives at k-1
  std::vector<double> group_prob_;               // cached success probs
  std::unordered_map<std::uint64_t, Pos, IdHash> index_;
  double mass_ = 0.0;
  double mass_comp_ = 0.0;  // Kahan compensation term
};

}  // namespace subsam
