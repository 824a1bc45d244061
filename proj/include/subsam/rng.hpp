#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace subsam {

// Seedable 64-bit random source shared by every sampler. mt19937_64 is fully
// specified by the standard, so equal seeds give identical streams on any
// platform. invocations() reports how many times the engine was consumed;
// methods that can decide without randomness (geometric with p = 1,
// single-slot first-candidate draws) consume nothing.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() {
    ++invocations_;
    return engine_();
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1): a raw zero is remapped to the smallest representable
  // positive value so callers may take logarithms safely.
  double uniform01_pos() {
    double u = uniform01();
    return u > 0.0 ? u : std::numeric_limits<double>::denorm_min();
  }

  // Unbiased integer in {0, ..., bound-1} (multiply-shift with rejection).
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_int: bound must be positive");
    while (true) {
      unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
      auto low = static_cast<std::uint64_t>(m);
      if (low >= bound || low >= (0 - bound) % bound) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

  // 1-based geometric skip: Pr[j = i] = (1-p)^(i-1) * p for i >= 1.
  // p = 1 returns 1 without consuming randomness. Astronomically long skips
  // are capped below 2^63; every caller treats an out-of-range skip as
  // "stop", so the cap is unobservable.
  std::uint64_t geometric(double p) {
    if (!(p > 0.0) || p > 1.0) {
      throw std::invalid_argument("geometric: p must be in (0, 1]");
    }
    if (p == 1.0) return 1;
    double j = std::floor(std::log(uniform01_pos()) / std::log1p(-p));
    if (j >= kSkipCap) return static_cast<std::uint64_t>(kSkipCap);
    return static_cast<std::uint64_t>(j) + 1;
  }

  // First candidate position inside a bounded sweep of group_size slots,
  // conditioned on at least one candidate appearing:
  //   Pr[j = i] = q * (1-q)^(i-1) / group_prob,  1 <= i <= group_size,
  // where group_prob = 1 - (1-q)^group_size up to rounding. Inverse-CDF with
  // the result clamped into [1, group_size]. q = 1 (and the single-slot
  // case, whose law is a point mass) return 1 without consuming randomness.
  std::uint64_t truncated_first(double q, double group_prob, std::uint64_t group_size) {
    if (!(q > 0.0) || q > 1.0) {
      throw std::invalid_argument("truncated_first: q must be in (0, 1]");
    }
    if (group_size == 0) {
      throw std::invalid_argument("truncated_first: group_size must be positive");
    }
    if (!(group_prob > 0.0) || group_prob > 1.0) {
      throw std::invalid_argument("truncated_first: group_prob must be in (0, 1]");
    }
    if (q == 1.0 || group_size == 1) return 1;
    double j = std::ceil(std::log1p(-uniform01() * group_prob) / std::log1p(-q));
    if (j < 1.0) return 1;
    if (j >= static_cast<double>(group_size)) return group_size;
    return static_cast<std::uint64_t>(j);
  }

  std::uint64_t invocations() const { return invocations_; }

 private:
  static constexpr double kSkipCap = 9.0e18;

  std::mt19937_64 engine_;
  std::uint64_t invocations_ = 0;
};

// Deterministic seed derivation for substructures (split-mix finalizer).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9E3779B97F4A7C15ull * (b + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

}  // namespace subsam
