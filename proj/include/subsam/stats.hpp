#pragma once

#include <cstdint>
#include <vector>

namespace subsam {

// Upper regularized incomplete gamma Q(a, x) (series + continued fraction).
double regularized_gamma_upper(double a, double x);

// Survival p-value for a chi-square statistic with dof degrees of freedom.
double chi_square_pvalue(double stat, int dof);

struct ChiSquareResult {
  double stat = 0.0;
  int dof = 0;
  double pvalue = 1.0;
  std::size_t cells = 0;  // cells remaining after low-expectation merging
};

// Goodness of fit of observed counts against cell probabilities. Cells whose
// expected count falls below min_expected are pooled (smallest first) so the
// chi-square approximation stays valid. probs must sum to ~1.
ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& counts,
                               const std::vector<double>& probs,
                               double min_expected = 5.0);

// Two-sample homogeneity test on parallel count vectors (unequal totals
// allowed). Cells with small combined counts are pooled.
ChiSquareResult chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                      const std::vector<std::uint64_t>& b,
                                      double min_combined = 10.0);

// Exact subset distribution for independent inclusions: entry `mask` is
// prod_{i in mask} p_i * prod_{i not in mask} (1 - p_i). Limited to n <= 16.
std::vector<double> exact_subset_probs(const std::vector<double>& probs);

}  // namespace subsam
