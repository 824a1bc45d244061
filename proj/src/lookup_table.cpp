#include "subsam/lookup_table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace subsam {

namespace {

void check_width(int m) {
  if (m < 1 || m > kMaxTableWidth) {
    throw std::invalid_argument("table width m must be in 1..15");
  }
}

void check_digits(const DigitVector& d, int m) {
  check_width(m);
  if (d.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("digit vector length must equal m");
  }
  for (int di : d) {
    if (di < 1 || di > m) throw std::invalid_argument("digit out of range 1..m");
  }
}

}  // namespace

std::uint64_t pow_u64(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) {
      throw std::overflow_error("pow_u64: overflow");
    }
    r *= base;
  }
  return r;
}

int digit_of(double p, int m) {
  check_width(m);
  if (!(p >= 0.0) || p > 1.0) {
    throw std::invalid_argument("digit_of: probability must be in [0, 1]");
  }
  int d = static_cast<int>(std::ceil(static_cast<double>(m) * p));
  if (d < 1) return 1;
  return d > m ? m : d;
}

DigitVector digits_from_probs(const std::vector<double>& probs, int m) {
  check_width(m);
  if (probs.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("digits_from_probs: need exactly m probabilities");
  }
  DigitVector d(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) d[i] = digit_of(probs[i], m);
  return d;
}

RowIndex row_index(const DigitVector& d, int m) {
  check_digits(d, m);
  RowIndex a = 0;
  std::uint64_t place = 1;
  for (std::size_t i = 0; i < d.size(); ++i) {
    a += static_cast<std::uint64_t>(d[i] - 1) * place;
    if (i + 1 < d.size()) place *= static_cast<std::uint64_t>(m);
  }
  return a;
}

RowIndex adjust_index(RowIndex a, int position, int d_old, int d_new, int m) {
  check_width(m);
  if (position < 1 || position > m) {
    throw std::out_of_range("adjust_index: position out of range");
  }
  if (d_old < 1 || d_old > m || d_new < 1 || d_new > m) {
    throw std::invalid_argument("adjust_index: digit out of range 1..m");
  }
  auto place = static_cast<std::int64_t>(pow_u64(static_cast<std::uint64_t>(m),
                                                 static_cast<unsigned>(position - 1)));
  auto shifted = static_cast<std::int64_t>(a) +
                 static_cast<std::int64_t>(d_new - d_old) * place;
  std::uint64_t limit = pow_u64(static_cast<std::uint64_t>(m), static_cast<unsigned>(m));
  if (shifted < 0 || static_cast<std::uint64_t>(shifted) >= limit) {
    throw std::out_of_range("adjust_index: result outside table");
  }
  return static_cast<RowIndex>(shifted);
}

DigitVector digits_of_index(RowIndex a, int m) {
  check_width(m);
  std::uint64_t limit = pow_u64(static_cast<std::uint64_t>(m), static_cast<unsigned>(m));
  if (a >= limit) throw std::out_of_range("digits_of_index: index outside table");
  DigitVector d(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    d[static_cast<std::size_t>(i)] = static_cast<int>(a % static_cast<std::uint64_t>(m)) + 1;
    a /= static_cast<std::uint64_t>(m);
  }
  return d;
}

std::uint64_t subset_weight(const DigitVector& d, SubsetMask mask, int m) {
  check_digits(d, m);
  if (mask >> d.size()) throw std::out_of_range("subset_weight: mask has stray bits");
  std::uint64_t w = 1;
  for (std::size_t i = 0; i < d.size(); ++i) {
    w *= static_cast<std::uint64_t>((mask >> i) & 1u ? d[i] : m - d[i]);
  }
  return w;
}

LookupRow build_row(const DigitVector& d, RowRepr repr, std::uint64_t dense_budget) {
  const int m = static_cast<int>(d.size());
  check_digits(d, m);
  LookupRow row;
  row.repr = repr;
  row.total = pow_u64(static_cast<std::uint64_t>(m), static_cast<unsigned>(m));
  const std::uint32_t masks = 1u << m;
  if (repr == RowRepr::dense) {
    if (row.total > dense_budget) {
      throw std::length_error("build_row: dense row exceeds entry budget");
    }
    row.dense.reserve(static_cast<std::size_t>(row.total));
    for (SubsetMask b = 0; b < masks; ++b) {
      std::uint64_t w = subset_weight(d, b, m);
      for (std::uint64_t i = 0; i < w; ++i) row.dense.push_back(b);
    }
  } else {
    row.cdf.resize(masks);
    std::uint64_t running = 0;
    for (SubsetMask b = 0; b < masks; ++b) {
      running += subset_weight(d, b, m);
      row.cdf[b] = running;
    }
  }
  return row;
}

SubsetMask row_sample(const LookupRow& row, RandomSource& src) {
  std::uint64_t r = src.uniform_int(row.total);
  if (row.repr == RowRepr::dense) {
    return row.dense[static_cast<std::size_t>(r)];
  }
  auto it = std::upper_bound(row.cdf.begin(), row.cdf.end(), r);
  return static_cast<SubsetMask>(it - row.cdf.begin());
}

RowCache::RowCache(std::size_t max_rows, RowRepr repr, std::uint64_t dense_budget)
    : max_rows_(max_rows), repr_(repr), dense_budget_(dense_budget) {
  if (max_rows_ == 0) throw std::invalid_argument("RowCache: capacity must be positive");
}

const LookupRow& RowCache::get_or_build(RowIndex a, const DigitVector& digits) {
  auto it = map_.find(a);
  if (it != map_.end()) {
    ++hits_;
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->second;
  }
  ++misses_;
  lru_.emplace_front(a, build_row(digits, repr_, dense_budget_));
  map_[a] = lru_.begin();
  if (map_.size() > max_rows_) {
    map_.erase(lru_.back().first);
    lru_.pop_back();
  }
  return lru_.front().second;
}

void table_query(const std::vector<double>& probs, const DigitVector& d,
                 RowIndex a, RowCache& cache, RandomSource& src, Counters& c,
                 std::vector<int>& out) {
  const int m = static_cast<int>(d.size());
  if (probs.size() != d.size()) {
    throw std::invalid_argument("table_query: probs/digits size mismatch");
  }
  const LookupRow& row = cache.get_or_build(a, d);
  std::uint64_t before = src.invocations();
  SubsetMask mask = row_sample(row, src);
  c.rng_draws += src.invocations() - before;
  for (int i = 0; i < m; ++i) {
    if (!((mask >> i) & 1u)) continue;
    ++c.candidates_generated;
    double p = probs[static_cast<std::size_t>(i)];
    if (p <= 0.0) continue;  // digit floor of 1: certain rejection, no flip
    double rounded = static_cast<double>(d[static_cast<std::size_t>(i)]) / m;
    bool accept = p >= rounded || src.uniform01() < p / rounded;
    if (accept) {
      out.push_back(i);
      ++c.acceptances;
    }
  }
}

}  // namespace subsam
