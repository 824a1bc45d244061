#pragma once

#include <cstdint>
#include <vector>

#include "subsam/counters.hpp"
#include "subsam/grouped_level.hpp"
#include "subsam/lookup_table.hpp"
#include "subsam/rng.hpp"

namespace subsam {

inline constexpr std::size_t kDefaultRowCacheRows = 64;

// Dynamic subset sampler with O(1 + mu) expected query work and O(1) update
// work (mu = sum of stored probabilities).
//
// Three levels. Level 0 buckets the elements by probability range. Level 1
// treats each level-0 bucket as a pseudo-element whose probability is the
// bucket's success probability, and buckets those again. Level 2 covers the
// level-1 bucket success probabilities with the m-digit lookup table. A
// query walks down: table mask -> accepted level-1 buckets -> sweeps that
// emit level-0 bucket ids -> sweeps that emit element ids. An update touches
// one level-0 bucket, moves at most one level-1 pseudo-element, and adjusts
// at most two table digits, so its cost is bounded by a constant.
//
// All level widths derive from the declared capacity, never from live
// occupancy, so bucket boundaries and the table width stay fixed:
//   K0 = ceil(log2 n_cap) + 1, K1 = ceil(log2 K0) + 1, m = K1.
class OdssSampler {
 public:
  OdssSampler(const std::vector<std::uint64_t>& ids,
              const std::vector<double>& probs, std::uint64_t n_cap,
              std::uint64_t seed, RowRepr repr = RowRepr::cdf,
              std::size_t row_cache_rows = kDefaultRowCacheRows);

  // Contract-strict insert: throws once occupancy reaches n_cap.
  void insert(std::uint64_t id, double prob);
  // Convenience used by callers that own open-ended sets (e.g. graph
  // adjacency): doubles the capacity via a full rebuild instead of throwing.
  void insert_or_grow(std::uint64_t id, double prob);
  void erase(std::uint64_t id);
  // Delete-then-insert, preserving the id.
  void modify(std::uint64_t id, double prob);

  void query(std::vector<std::uint64_t>& out);
  std::vector<std::uint64_t> query();

  std::size_t size() const { return level0_.size(); }
  std::uint64_t n_cap() const { return n_cap_; }
  int k0() const { return level0_.group_count(); }
  int k1() const { return level1_.group_count(); }
  int m() const { return m_; }

  bool contains(std::uint64_t id) const { return level0_.contains(id); }
  double prob_of(std::uint64_t id) const { return level0_.prob_of(id); }

  // mu at each level: 0 = stored element probabilities (compensated running
  // sum), 1 = level-1 pseudo-element probabilities, 2 = table probabilities.
  double mass() const { return level0_.mass(); }
  double level_mass(int level) const;
  // Mass growth bound between adjacent levels:
  // mu^(l) <= 2^l * mu + 2^l - 1 for l = 1, 2.
  bool level_mass_bounded() const;

  const Counters& counters() const { return counters_; }
  void reset_counters() { counters_.reset(); }
  std::uint64_t rng_invocations() const { return src_.invocations(); }

  // Introspection for consistency checks and tests.
  const GroupedLevel& level0() const { return level0_; }
  const GroupedLevel& level1() const { return level1_; }
  const std::vector<double>& level2_probs() const { return level2_probs_; }
  const DigitVector& digits() const { return digits_; }
  RowIndex row_index_value() const { return row_index_; }
  const RowCache& row_cache() const { return cache_; }

  // Cross-level link integrity: level-1 stored probs match level-0 bucket
  // probs, table probs match level-1 bucket probs, digits and row index
  // match a fresh recomputation, and the running mass matches an O(n) resum.
  bool verify_links(double tol = 1e-12) const;

 private:
  void build(const std::vector<std::uint64_t>& ids, const std::vector<double>& probs);
  void rebuild(std::uint64_t new_cap);
  // Push the new success probability of level-0 bucket k upward.
  void sync_from_group(int k);
  void refresh_level2(int j);

  std::uint64_t n_cap_;
  int m_;
  GroupedLevel level0_;
  GroupedLevel level1_;
  std::vector<double> level2_probs_;  // level-1 bucket success probs
  DigitVector digits_;
  RowIndex row_index_ = 0;
  RowRepr repr_;
  std::size_t cache_rows_;
  RowCache cache_;
  RandomSource src_;
  Counters counters_;
  std::vector<int> l2buf_;            // accepted table positions
  std::vector<std::uint64_t> l1buf_;  // accepted level-0 bucket ids
};

// Query-only multi-level sampler: L grouping layers, with the topmost layer
// sampled by per-element coin flips. Mainly a reference point — the lookup
// table replaces the coin-flip top in OdssSampler.
class BasicSampler {
 public:
  // levels = 0 picks the iterated-log depth log2*(n).
  BasicSampler(const std::vector<std::uint64_t>& ids,
               const std::vector<double>& probs, std::uint64_t seed,
               int levels = 0);

  void query(std::vector<std::uint64_t>& out);
  std::vector<std::uint64_t> query();

  int levels() const { return static_cast<int>(levels_.size()); }
  std::size_t size() const;
  // 0..levels()-1 are grouping layers; level levels() is the coin-flip top.
  double level_mass(int level) const;
  const GroupedLevel& level(int i) const { return levels_.at(static_cast<std::size_t>(i)); }
  const std::vector<double>& top_probs() const { return top_probs_; }

  const Counters& counters() const { return counters_; }
  void reset_counters() { counters_.reset(); }
  std::uint64_t rng_invocations() const { return src_.invocations(); }

 private:
  std::vector<GroupedLevel> levels_;
  std::vector<double> top_probs_;
  RandomSource src_;
  Counters counters_;
  std::vector<std::uint64_t> bufa_;
  std::vector<std::uint64_t> bufb_;
};

// Iterated binary logarithm: applications of log2 until the value is <= 1.
int log2_star(double n);

}  // namespace subsam
