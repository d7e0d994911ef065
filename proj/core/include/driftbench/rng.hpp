// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace driftbench {

/// Counter-based 64-bit PRNG (splitmix-style output function applied to a
/// Weyl-sequence counter).  Stateless apart from the counter, so streams are
/// cheap to fork: replication r of a study uses seed = base_seed + r and the
/// resulting draws are independent for all practical purposes.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform draw in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (have_cache_) {
      have_cache_ = false;
      return cache_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double c = std::cos(2.0 * M_PI * u2);
    const double s = std::sin(2.0 * M_PI * u2);
    cache_ = r * s;
    have_cache_ = true;
    return r * c;
  }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
  double cache_ = 0.0;
  bool have_cache_ = false;
};

}  // namespace driftbench
