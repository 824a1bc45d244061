#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cstdint>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "subsam/counters.hpp"
#include "subsam/lookup_table.hpp"
#include "subsam/rng.hpp"
#include "subsam/stats.hpp"

using namespace subsam;

TEST_CASE("digit rounding") {
  CHECK(digit_of(0.0, 3) == 1);   // clamped up; thinning rejects with certainty
  CHECK(digit_of(0.1, 3) == 1);
  CHECK(digit_of(1.0 / 3.0, 3) == 1);
  CHECK(digit_of(0.34, 3) == 2);
  CHECK(digit_of(0.999, 3) == 3);
  CHECK(digit_of(1.0, 3) == 3);
  CHECK(digit_of(1.0, 15) == 15);
  CHECK_THROWS_AS(digit_of(-0.1, 3), std::invalid_argument);
  CHECK_THROWS_AS(digit_of(1.1, 3), std::invalid_argument);
  CHECK_THROWS_AS(digit_of(0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(digit_of(0.5, 16), std::invalid_argument);

  CHECK(digits_from_probs({0.2, 0.5, 0.9}, 3) == DigitVector{1, 2, 3});
  CHECK_THROWS_AS(digits_from_probs({0.2, 0.5}, 3), std::invalid_argument);
}

TEST_CASE("row indexing is the mixed-radix bijection") {
  CHECK(row_index({1, 1, 1}, 3) == 0);
  CHECK(row_index({2, 1, 1}, 3) == 1);
  CHECK(row_index({1, 2, 3}, 3) == 0 + 1 * 3 + 2 * 9);
  CHECK(row_index({3, 3, 3}, 3) == 26);

  for (RowIndex a = 0; a < 27; ++a) {
    DigitVector d = digits_of_index(a, 3);
    CHECK(row_index(d, 3) == a);
  }
  CHECK_THROWS_AS(digits_of_index(27, 3), std::out_of_range);
}

TEST_CASE("incremental reindexing equals recomputation") {
  for (RowIndex a = 0; a < 256; ++a) {
    DigitVector d = digits_of_index(a, 4);
    for (int pos = 1; pos <= 4; ++pos) {
      for (int nd = 1; nd <= 4; ++nd) {
        DigitVector d2 = d;
        d2[static_cast<std::size_t>(pos - 1)] = nd;
        CHECK(adjust_index(a, pos, d[static_cast<std::size_t>(pos - 1)], nd, 4) ==
              row_index(d2, 4));
      }
    }
  }
  CHECK_THROWS_AS(adjust_index(0, 5, 1, 2, 4), std::out_of_range);
  CHECK_THROWS_AS(adjust_index(0, 1, 1, 9, 4), std::invalid_argument);
}

TEST_CASE("subset weights form an exact partition of m^m") {
  const DigitVector cases[] = {{1, 2, 3}, {3, 3, 3}, {1, 1, 1}, {2, 2, 1}};
  for (const DigitVector& d : cases) {
    std::uint64_t total = 0;
    for (SubsetMask b = 0; b < 8; ++b) total += subset_weight(d, b, 3);
    CHECK(total == 27);
  }
  CHECK(subset_weight({1, 2, 3}, 0b000, 3) == 2 * 1 * 0);
  CHECK(subset_weight({1, 2, 3}, 0b100, 3) == 2 * 1 * 3);
  CHECK(subset_weight({1, 2, 3}, 0b111, 3) == 1 * 2 * 3);
  CHECK_THROWS_AS(subset_weight({1, 2, 3}, 0b11000, 3), std::out_of_range);
}

TEST_CASE("row layouts agree with the weights") {
  const DigitVector d = {1, 2};
  LookupRow dense = build_row(d, RowRepr::dense);
  REQUIRE(dense.total == 4);
  REQUIRE(dense.dense.size() == 4);
  // Weights are 0,0,2,2 over masks 0..3; entries ascend by mask.
  CHECK(dense.dense == std::vector<SubsetMask>{2, 2, 3, 3});

  LookupRow cdf = build_row(d, RowRepr::cdf);
  REQUIRE(cdf.cdf.size() == 4);
  CHECK(cdf.cdf == std::vector<std::uint64_t>{0, 0, 2, 4});

  // Both layouts draw the same distribution.
  RandomSource s1(10), s2(10);
  for (int i = 0; i < 2000; ++i) CHECK(row_sample(dense, s1) == row_sample(cdf, s2));
}

TEST_CASE("dense layout respects the entry budget") {
  DigitVector d9(9, 5);
  CHECK_THROWS_AS(build_row(d9, RowRepr::dense), std::length_error);  // 9^9 > 2^24
  LookupRow row = build_row(d9, RowRepr::cdf);                        // 2^9 entries
  CHECK(row.cdf.size() == 512);
  CHECK(row.cdf.back() == pow_u64(9, 9));
  // A small budget refuses even small rows.
  CHECK_THROWS_AS(build_row({2, 2}, RowRepr::dense, 3), std::length_error);
}

TEST_CASE("pow_u64 guards overflow") {
  CHECK(pow_u64(15, 15) == 437893890380859375ull);
  CHECK(pow_u64(2, 63) == (1ull << 63));
  CHECK_THROWS_AS(pow_u64(2, 64), std::overflow_error);
}

TEST_CASE("row cache is LRU and never stale") {
  RowCache cache(2, RowRepr::cdf);
  DigitVector d1 = digits_of_index(1, 3);
  DigitVector d2 = digits_of_index(2, 3);
  DigitVector d3 = digits_of_index(3, 3);
  cache.get_or_build(1, d1);
  cache.get_or_build(2, d2);
  CHECK(cache.misses() == 2);
  cache.get_or_build(1, d1);  // hit; key 2 becomes least recent
  CHECK(cache.hits() == 1);
  cache.get_or_build(3, d3);  // evicts key 2
  CHECK(cache.size() == 2);
  cache.get_or_build(2, d2);  // miss again
  CHECK(cache.misses() == 4);
  // Rebuilt row is identical to a fresh one.
  const LookupRow& row = cache.get_or_build(2, d2);
  LookupRow fresh = build_row(d2, RowRepr::cdf);
  CHECK(row.cdf == fresh.cdf);
  CHECK_THROWS_AS(RowCache(0), std::invalid_argument);
}

static void check_table_law(RowRepr repr) {
  const std::vector<double> probs = {0.2, 0.5, 0.9};
  const int m = 3;
  DigitVector d = digits_from_probs(probs, m);
  RowIndex a = row_index(d, m);
  RowCache cache(8, repr);
  RandomSource src(404);
  Counters c;
  std::vector<int> out;

  const std::uint64_t trials = 300000;
  std::vector<std::uint64_t> counts(8, 0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    out.clear();
    Counters before = c;
    std::uint64_t inv_before = src.invocations();
    table_query(probs, d, a, cache, src, c, out);
    Counters delta = c - before;
    CHECK(delta.rng_draws == 1);  // exactly the row pick
    CHECK(src.invocations() - inv_before <= 1 + delta.candidates_generated);
    ++counts[testutil::mask_of(out)];
  }
  CHECK(subsam::chi_square_gof(counts, subsam::exact_subset_probs(probs)).pvalue > 0.001);
  CHECK(cache.misses() == 1);  // static digits: one row serves every query
}

TEST_CASE("table query reproduces independent inclusions (cdf rows)") {
  check_table_law(RowRepr::cdf);
}

TEST_CASE("table query reproduces independent inclusions (dense rows)") {
  check_table_law(RowRepr::dense);
}

TEST_CASE("probabilities on digit boundaries never pay acceptance flips") {
  const std::vector<double> probs = {1.0 / 3.0, 2.0 / 3.0, 1.0};
  const int m = 3;
  DigitVector d = digits_from_probs(probs, m);
  REQUIRE(d == DigitVector{1, 2, 3});
  RowIndex a = row_index(d, m);
  RowCache cache(8);
  RandomSource src(11);
  Counters c;
  std::vector<int> out;
  for (int t = 0; t < 20000; ++t) {
    out.clear();
    std::uint64_t inv_before = src.invocations();
    table_query(probs, d, a, cache, src, c, out);
    CHECK(src.invocations() - inv_before == 1);  // row pick only
    bool has2 = false;
    for (int i : out) has2 = has2 || i == 2;
    CHECK(has2);  // the certain element is in every sample
  }
}

TEST_CASE("zero probability is never emitted") {
  const std::vector<double> probs = {0.0, 0.7, 0.25};
  DigitVector d = digits_from_probs(probs, 3);
  RowIndex a = row_index(d, 3);
  RowCache cache(8);
  RandomSource src(12);
  Counters c;
  std::vector<int> out;
  std::vector<std::uint64_t> counts(8, 0);
  const std::uint64_t trials = 200000;
  for (std::uint64_t t = 0; t < trials; ++t) {
    out.clear();
    table_query(probs, d, a, cache, src, c, out);
    for (int i : out) CHECK(i != 0);
    ++counts[testutil::mask_of(out)];
  }
  CHECK(subsam::chi_square_gof(counts, subsam::exact_subset_probs(probs)).pvalue > 0.001);
}

TEST_CASE("table query validates its inputs") {
  RowCache cache(4);
  RandomSource src(1);
  Counters c;
  std::vector<int> out;
  DigitVector d = {1, 2};
  CHECK_THROWS_AS(table_query({0.1}, d, row_index(d, 2), cache, src, c, out),
                  std::invalid_argument);
}
