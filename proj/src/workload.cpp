#include "subsam/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "subsam/rng.hpp"

namespace subsam {

namespace {

// One standard normal via Box-Muller (two uniforms, cosine branch): fully
// deterministic for a given stream, unlike std::normal_distribution.
double draw_standard_normal(RandomSource& src) {
  double u1 = src.uniform01_pos();
  double u2 = src.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double draw_raw(Distribution dist, RandomSource& src) {
  switch (dist) {
    case Distribution::normal:
      return draw_standard_normal(src) * std::sqrt(10.0);  // mean 0, variance 10
    case Distribution::half_normal:
      return std::fabs(draw_standard_normal(src) * std::sqrt(10.0));
    case Distribution::exponential:
      return -std::log(src.uniform01_pos());  // rate 1
    case Distribution::log_normal:
      // log-scale mean 0, variance ln 2
      return std::exp(draw_standard_normal(src) * std::sqrt(std::log(2.0)));
  }
  throw std::invalid_argument("unknown distribution");
}

}  // namespace

Distribution distribution_from_name(std::string_view name) {
  if (name == "normal") return Distribution::normal;
  if (name == "half_normal") return Distribution::half_normal;
  if (name == "exponential") return Distribution::exponential;
  if (name == "log_normal") return Distribution::log_normal;
  throw std::invalid_argument("unknown distribution name: " + std::string(name));
}

std::string to_string(Distribution d) {
  switch (d) {
    case Distribution::normal:
      return "normal";
    case Distribution::half_normal:
      return "half_normal";
    case Distribution::exponential:
      return "exponential";
    case Distribution::log_normal:
      return "log_normal";
  }
  return "unknown";
}

std::vector<double> gen_workload(const WorkloadSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("gen_workload: n must be positive");
  if (!(spec.mu_target > 0.0)) {
    throw std::invalid_argument("gen_workload: mu_target must be positive");
  }
  if (spec.mu_target > static_cast<double>(spec.n)) {
    throw std::invalid_argument("gen_workload: mu_target exceeds n");
  }

  RandomSource src(spec.seed);
  std::vector<double> v(spec.n);
  for (double& x : v) x = draw_raw(spec.dist, src);

  double lo = *std::min_element(v.begin(), v.end());
  double hi = *std::max_element(v.begin(), v.end());
  double range = hi - lo;
  if (range <= 0.0) {
    // Degenerate draw (e.g. n = 1): spread the target mass evenly.
    std::fill(v.begin(), v.end(), spec.mu_target / static_cast<double>(spec.n));
    return v;
  }
  for (double& x : v) x = (x - lo) / range;

  double sum = 0.0;
  for (double x : v) sum += x;
  double scale = spec.mu_target / sum;
  std::size_t fixed_ones = 0;
  for (double& x : v) {
    x *= scale;
    if (x >= 1.0) {
      x = 1.0;
      ++fixed_ones;
    }
  }

  // Clamp-and-redistribute: elements pinned at 1 keep their mass; the
  // remainder is rescaled to absorb the shortfall. Each round either
  // converges or pins at least one more element.
  for (int round = 0; round < 64; ++round) {
    double total = 0.0;
    for (double x : v) total += x;
    if (std::fabs(total - spec.mu_target) <= 1e-9) return v;
    double free_sum = total - static_cast<double>(fixed_ones);
    double need = spec.mu_target - static_cast<double>(fixed_ones);
    std::size_t free_count = v.size() - fixed_ones;
    if (need < 0.0) {
      // Simultaneous pinning overshot the target: deflate everything
      // uniformly. All values shrink below 1, so the sum lands exactly.
      for (double& x : v) x *= spec.mu_target / total;
      return v;
    }
    if (free_sum <= 0.0) {
      // Only zero-valued elements remain free; proportional rescaling cannot
      // lift them, so spread the shortfall evenly (need <= free_count
      // because mu_target <= n, hence each share stays within [0, 1]).
      if (free_count == 0) break;
      double share = need / static_cast<double>(free_count);
      for (double& x : v) {
        if (x < 1.0) x = share;
      }
      return v;
    }
    double s = need / free_sum;
    for (double& x : v) {
      if (x >= 1.0) continue;
      x *= s;
      if (x >= 1.0) {
        x = 1.0;
        ++fixed_ones;
      }
    }
  }
  throw std::runtime_error("gen_workload: clamp redistribution did not converge");
}

}  // namespace subsam
