#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace subsam {

// Probability-vector shapes used by the benchmarks. Raw values are drawn
// i.i.d. from the named law, shifted so the minimum is 0, rescaled so the
// range is [0, 1], then rescaled so the sum equals mu_target — with values
// that exceed 1 clamped and the excess redistributed proportionally over the
// rest until the sum is back within 1e-9.
enum class Distribution { normal, half_normal, exponential, log_normal };

Distribution distribution_from_name(std::string_view name);
std::string to_string(Distribution d);

struct WorkloadSpec {
  Distribution dist = Distribution::exponential;
  std::uint64_t n = 0;
  double mu_target = 0.0;
  std::uint64_t seed = 0;
};

// Deterministic for a given WorkloadSpec. Throws when mu_target is not in (0, n] or
// when clamping fails to converge within 64 rounds.
std::vector<double> gen_workload(const WorkloadSpec& spec);

}  // namespace subsam
