#include "subsam/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace subsam {

namespace {

// Lower regularized incomplete gamma P(a, x) by power series; valid x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma Q(a, x) by Lentz continued fraction;
// valid x >= a+1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

struct Cell {
  std::uint64_t observed;
  double expected;
};

double pearson_stat(const std::vector<Cell>& cells) {
  double stat = 0.0;
  for (const Cell& c : cells) {
    double diff = static_cast<double>(c.observed) - c.expected;
    stat += diff * diff / c.expected;
  }
  return stat;
}

// Pools cells with expectations below the floor, smallest first, so every
// remaining cell satisfies the approximation requirement.
std::vector<Cell> merge_small_cells(std::vector<Cell> cells, double floor_value) {
  std::sort(cells.begin(), cells.end(),
            [](const Cell& a, const Cell& b) { return a.expected < b.expected; });
  std::vector<Cell> merged;
  Cell pool{0, 0.0};
  for (const Cell& c : cells) {
    if (c.expected >= floor_value && pool.expected == 0.0) {
      merged.push_back(c);
      continue;
    }
    pool.observed += c.observed;
    pool.expected += c.expected;
    if (pool.expected >= floor_value) {
      merged.push_back(pool);
      pool = Cell{0, 0.0};
    }
  }
  if (pool.expected > 0.0) {
    if (merged.empty()) {
      merged.push_back(pool);
    } else {
      merged.front().observed += pool.observed;
      merged.front().expected += pool.expected;
    }
  }
  return merged;
}

}  // namespace

double regularized_gamma_upper(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw std::invalid_argument("regularized_gamma_upper: need a > 0, x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_pvalue(double stat, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof must be >= 1");
  if (stat <= 0.0) return 1.0;
  return regularized_gamma_upper(0.5 * dof, 0.5 * stat);
}

ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& counts,
                               const std::vector<double>& probs,
                               double min_expected) {
  if (counts.size() != probs.size() || counts.empty()) {
    throw std::invalid_argument("chi_square_gof: size mismatch or empty input");
  }
  double total_prob = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::fabs(total_prob - 1.0) > 1e-6) {
    throw std::invalid_argument("chi_square_gof: cell probabilities must sum to 1");
  }
  auto n = static_cast<double>(std::accumulate(counts.begin(), counts.end(),
                                               std::uint64_t{0}));
  std::vector<Cell> cells;
  cells.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] < 0.0) throw std::invalid_argument("chi_square_gof: negative probability");
    cells.push_back(Cell{counts[i], probs[i] * n});
  }
  cells = merge_small_cells(std::move(cells), min_expected);
  ChiSquareResult r;
  r.cells = cells.size();
  if (cells.size() < 2) {
    throw std::invalid_argument("chi_square_gof: too few samples for any comparison");
  }
  r.stat = pearson_stat(cells);
  r.dof = static_cast<int>(cells.size()) - 1;
  r.pvalue = chi_square_pvalue(r.stat, r.dof);
  return r;
}

ChiSquareResult chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                      const std::vector<std::uint64_t>& b,
                                      double min_combined) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("chi_square_two_sample: size mismatch or empty input");
  }
  double na = static_cast<double>(std::accumulate(a.begin(), a.end(), std::uint64_t{0}));
  double nb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::uint64_t{0}));
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("chi_square_two_sample: empty sample");
  }
  // Pool small cells on combined counts, then apply the standard
  // sqrt-ratio-weighted statistic.
  struct Pair {
    double ca, cb;
  };
  std::vector<Pair> cells;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cells.push_back(Pair{static_cast<double>(a[i]), static_cast<double>(b[i])});
  }
  std::sort(cells.begin(), cells.end(),
            [](const Pair& x, const Pair& y) { return x.ca + x.cb < y.ca + y.cb; });
  std::vector<Pair> merged;
  Pair pool{0.0, 0.0};
  for (const Pair& c : cells) {
    if (c.ca + c.cb >= min_combined && pool.ca + pool.cb == 0.0) {
      merged.push_back(c);
      continue;
    }
    pool.ca += c.ca;
    pool.cb += c.cb;
    if (pool.ca + pool.cb >= min_combined) {
      merged.push_back(pool);
      pool = Pair{0.0, 0.0};
    }
  }
  if (pool.ca + pool.cb > 0.0) {
    if (merged.empty()) {
      merged.push_back(pool);
    } else {
      merged.front().ca += pool.ca;
      merged.front().cb += pool.cb;
    }
  }
  ChiSquareResult r;
  r.cells = merged.size();
  if (merged.size() < 2) {
    throw std::invalid_argument("chi_square_two_sample: too few samples");
  }
  double k1 = std::sqrt(nb / na);
  double k2 = std::sqrt(na / nb);
  r.stat = 0.0;
  for (const Pair& c : merged) {
    double diff = k1 * c.ca - k2 * c.cb;
    r.stat += diff * diff / (c.ca + c.cb);
  }
  r.dof = static_cast<int>(merged.size()) - 1;
  r.pvalue = chi_square_pvalue(r.stat, r.dof);
  return r;
}

std::vector<double> exact_subset_probs(const std::vector<double>& probs) {
  if (probs.size() > 16) {
    throw std::invalid_argument("exact_subset_probs: limited to n <= 16");
  }
  for (double p : probs) {
    if (!(p >= 0.0) || p > 1.0) {
      throw std::invalid_argument("exact_subset_probs: probability out of range");
    }
  }
  std::size_t n = probs.size();
  std::vector<double> law(std::size_t{1} << n, 1.0);
  for (std::size_t mask = 0; mask < law.size(); ++mask) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      p *= ((mask >> i) & 1u) ? probs[i] : 1.0 - probs[i];
    }
    law[mask] = p;
  }
  return law;
}

}  // namespace subsam
