#pragma once

#include <cstdint>
#include <list>
#include <unordered_map>
#include <vector>

#include "subsam/counters.hpp"
#include "subsam/rng.hpp"

namespace subsam {

// Top-level lookup table over m probabilities. Each probability is rounded
// up to a digit d_i = max(1, ceil(m * p_i)) in 1..m; the digit vector indexes
// one of m^m rows, and each row encodes a distribution over the 2^m subset
// masks with exact integer weights
//   w(B) = prod_{i in B} d_i * prod_{i not in B} (m - d_i),  sum_B w(B) = m^m.
// Sampling a mask and then thinning candidate i with p_i / (d_i / m) yields
// exact per-element inclusion probabilities p_i.

using DigitVector = std::vector<int>;  // values in 1..m, length m
using RowIndex = std::uint64_t;        // sum_i (d_i - 1) * m^(i-1)
using SubsetMask = std::uint32_t;      // bit i set iff element i+1 included

// Row indices and total weights must fit in 64 bits: m^m < 2^64 needs m <= 15.
inline constexpr int kMaxTableWidth = 15;

// Default entry budget for the dense representation (m^m mask entries).
inline constexpr std::uint64_t kDefaultDenseBudget = 1ull << 24;

// base^exp with an overflow guard.
std::uint64_t pow_u64(std::uint64_t base, unsigned exp);

// Digit for one probability: max(1, ceil(m * p)). p = 0 clamps to 1; the
// downstream thinning step then rejects such candidates with certainty.
int digit_of(double p, int m);

DigitVector digits_from_probs(const std::vector<double>& probs, int m);

RowIndex row_index(const DigitVector& d, int m);

// Incremental row reindexing after one digit change at 1-based position:
// A' = A + (d_new - d_old) * m^(position-1).
RowIndex adjust_index(RowIndex a, int position, int d_old, int d_new, int m);

// Inverse of row_index (mixed-radix decode), mainly for consistency checks.
DigitVector digits_of_index(RowIndex a, int m);

std::uint64_t subset_weight(const DigitVector& d, SubsetMask mask, int m);

enum class RowRepr { dense, cdf };

struct LookupRow {
  RowRepr repr;
  std::uint64_t total;             // m^m
  std::vector<SubsetMask> dense;   // m^m entries, masks repeated w(B) times,
                                   // ascending mask order
  std::vector<std::uint64_t> cdf;  // 2^m cumulative weights, back() == m^m
};

// Builds one row. The dense form is refused when m^m exceeds dense_budget.
LookupRow build_row(const DigitVector& d, RowRepr repr,
                    std::uint64_t dense_budget = kDefaultDenseBudget);

// Draws a mask with probability w(B) / m^m (one uniform integer draw).
SubsetMask row_sample(const LookupRow& row, RandomSource& src);

// Rows are built lazily on first use and kept in an LRU cache keyed by row
// index. The digit-to-index map is a bijection, so a cached row never goes
// stale; updates merely shift which key is requested.
class RowCache {
 public:
  explicit RowCache(std::size_t max_rows, RowRepr repr = RowRepr::cdf,
                    std::uint64_t dense_budget = kDefaultDenseBudget);

  const LookupRow& get_or_build(RowIndex a, const DigitVector& digits);

  std::size_t size() const { return map_.size(); }
  std::size_t capacity() const { return max_rows_; }
  RowRepr repr() const { return repr_; }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }

 private:
  std::size_t max_rows_;
  RowRepr repr_;
  std::uint64_t dense_budget_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::list<std::pair<RowIndex, LookupRow>> lru_;  // front = most recent
  std::unordered_map<RowIndex, std::list<std::pair<RowIndex, LookupRow>>::iterator> map_;
};

// Full table query: draw a mask from the row for digit vector d (index a),
// then thin candidate i with probability probs[i] / (d[i] / m). Accepted
// 0-based positions are appended to out.
void table_query(const std::vector<double>& probs, const DigitVector& d,
                 RowIndex a, RowCache& cache, RandomSource& src, Counters& c,
                 std::vector<int>& out);

}  // namespace subsam
