// SPDX-License-Identifier: Apache-2.0
/**
 * @file simulate.hpp
 * @brief Euler-Maruyama simulation of dX = b(X)dt + sigma(X)dW on a fine
 * grid, subsampling to the discrete observations, the (b, Z, R) increment
 * decomposition, and the Holder-modulus diagnostic.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "driftbench/model.hpp"
#include "driftbench/rng.hpp"

namespace driftbench {

struct PathConfig {
  std::size_t n = 1024;     // number of observed increments
  double Delta = 0.01;      // sampling step
  int substeps = 50;        // fine Euler steps per Delta
  std::uint64_t seed = 1;
  double L0 = 10.0;         // high-frequency budget for n Delta^2 log(1/Delta)
  bool high_frequency = true;
  std::optional<double> x0;  // fixed start; default draws X0 ~ mu_b

  double fine_dt() const { return Delta / substeps; }
  /// n Delta^2 log(1/Delta) <= L0 (when flagged high-frequency) and n Delta >= 1.
  bool regime_ok() const;
  double regime_statistic() const;
};

/// Fine-grid path: values at times i * dt, i = 0..n*substeps (unperiodised).
struct SamplePath {
  double dt = 0.0;
  double x0 = 0.0;
  std::vector<double> values;

  std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
  double horizon() const { return static_cast<double>(steps()) * dt; }
};

/// The discrete data X^(n) = (X_0, ..., X_{n Delta}).
struct Observations {
  double delta = 0.0;
  std::vector<double> samples;  // n+1 values

  std::size_t n() const { return samples.empty() ? 0 : samples.size() - 1; }
};

/// Euler-Maruyama path started from config.x0 if given, else from an
/// inverse-CDF draw of mu_b.  Coefficients are evaluated at the periodised
/// state.  Deterministic in (model, config, rng seed).
SamplePath simulate_path(const Model& model, const PathConfig& config, CounterRng& rng);

/// Convenience overload seeding the generator from config.seed.
SamplePath simulate_path(const Model& model, const PathConfig& config);

/// Every substeps-th fine node.  Throws on a length mismatch.
Observations subsample(const SamplePath& path, const PathConfig& config);

/// Per-increment decomposition Delta^{-1}(X_{(k+1)D} - X_{kD}) = b + Z + R.
struct IncrementParts {
  std::vector<double> bterm;  // b(X_{kDelta})
  std::vector<double> z;      // martingale part
  std::vector<double> r;      // discretisation remainder
};

IncrementParts increments_decomposition(const SamplePath& path, const Observations& obs,
                                        const Model& model);

/// Brownian-scale modulus w_m(delta) = sqrt(delta) (sqrt(log 1/delta) + sqrt(log m)),
/// with w_m := w_1 for m < 1.
double modulus_envelope(double delta, double m);

/// sup over fine-grid pairs s != t with |t-s| <= mesh_cap of
/// |X_t - X_s| / w_m(|t-s|).  Requires mesh_cap <= e^-2.
double holder_modulus_stat(const SamplePath& path, double m, double mesh_cap);

}  // namespace driftbench
