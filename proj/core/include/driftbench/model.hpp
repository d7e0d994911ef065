// SPDX-License-Identifier: Apache-2.0
/**
 * @file model.hpp
 * @brief Scalar periodic diffusion dX = b(X)dt + sigma(X)dW: parameter
 * specifications, the invariant density of the periodised process, the scale
 * function, and invariant-density divergences.
 */
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "driftbench/grid.hpp"
#include "driftbench/rng.hpp"

namespace driftbench {

/// Drift with its derivative and the Theta(K0) certificate bound.
struct DriftSpec {
  PeriodicFunction f;
  PeriodicFunction df;
  double K0 = 1.0;

  /// Closed-form drift with analytic derivative.
  static DriftSpec closed_form(PeriodicFunction fn, PeriodicFunction dfn, double K0);
  /// Derivative filled in by 4th-order central differences on `grid_n` nodes.
  static DriftSpec from_function(const PeriodicFunction& fn, double K0,
                                 std::size_t grid_n = 4096);
  static DriftSpec zero(double K0 = 1.0);
};

struct SigmaSpec {
  PeriodicFunction f;
  PeriodicFunction second_derivative;
  double sigma_L = 1.0;
  double sigma_U = 1.0;

  static SigmaSpec constant(double value);
};

struct ModelParams {
  DriftSpec drift;
  SigmaSpec sigma;
  std::optional<double> s;   // Besov smoothness certificate
  std::optional<double> A0;  // Besov norm bound
};

/// Result of the Theta(K0) membership check on the 4096-point grid.
struct ThetaCheck {
  bool ok = false;
  double c1_norm = 0.0;  // ||b||_inf + ||b'||_inf on the grid
};

ThetaCheck check_theta_membership(const DriftSpec& drift, std::size_t grid_n = 4096);

/// Grid representation of the invariant density pi_b with normaliser H_b and
/// a CDF for inverse-transform sampling from mu_b.
class InvariantDensity {
 public:
  InvariantDensity() = default;
  InvariantDensity(std::vector<double> values, double H_b);

  const std::vector<double>& values() const { return grid_.values(); }
  double normalizer() const { return H_b_; }
  double operator()(double x) const { return grid_(x); }
  double cdf(double x) const;
  /// Inverse CDF: binary search on the monotone grid CDF with linear
  /// interpolation; ties break toward the lower node.
  double cdf_inv(double u) const;
  double sample(CounterRng& rng) const { return cdf_inv(rng.uniform()); }
  std::size_t grid_size() const { return grid_.intervals(); }

 private:
  GridFn grid_;
  double H_b_ = 1.0;
  std::vector<double> cdf_;
};

/// Immutable model with cached grid quantities (b, sigma, I_b, scale
/// function).  All integrals are composite trapezoid on the uniform cache
/// grid; values between nodes are linear interpolations.
class Model {
 public:
  explicit Model(ModelParams params, std::size_t grid_n = 4096);

  const ModelParams& params() const { return params_; }
  std::size_t grid_n() const { return n_; }

  /// Invariant density cached at the model grid resolution.  Throws if the
  /// closed form could not be resolved on the grid (vanishing sigma).
  const InvariantDensity& stationary() const {
    if (!stationary_ok_)
      throw std::runtime_error("Model: invariant density unresolvable on the grid");
    return stationary_;
  }

  double drift(double x) const { return b_(x); }
  double drift_exact(double x) const { return params_.drift.f(x); }
  double sigma(double x) const { return sig_(x); }
  double sigma2(double x) const { return sig2_(x); }

  /// I_b(x) = int_0^x (2b/sigma^2)(y) dy for x in [0,1].
  double integrated_drift(double x) const;

  InvariantDensity invariant_density(std::size_t grid_size) const;

  /// Closed-form (pi_L, pi_U) = (sL^2 sU^-2 e^{-12 K0/sL^2}, its inverse).
  std::pair<double, double> density_bounds() const;

  /// Scale function S(x) = int_0^x exp(-I_b(y)) dy and its inverse on
  /// [0, S(1)], the latter by monotone bisection to 1e-10.
  double scale_function(double x) const;
  double scale_inverse(double y) const;

 private:
  ModelParams params_;
  std::size_t n_;
  GridFn b_, sig_, sig2_;
  GridFn ib_;     // cumulative trapezoid of 2b/sigma^2
  GridFn scale_;  // cumulative trapezoid of e^{-I_b}
  InvariantDensity stationary_;
  bool stationary_ok_ = true;
};

/// K(pi_0, pi_b) = int pi_0 log(pi_0 / pi_b), by quadrature on a shared grid.
double kl_invariant(const Model& model0, const Model& model,
                    std::size_t grid_size = 4096);

/// Squared Hellinger distance h^2(pi_0, pi_b) = int (sqrt(pi_0)-sqrt(pi_b))^2.
double hellinger_invariant(const Model& model0, const Model& model,
                           std::size_t grid_size = 4096);

/// Var_{pi_0}[log(pi_0/pi_b)] by quadrature.
double var_log_invariant_ratio(const Model& model0, const Model& model,
                               std::size_t grid_size = 4096);

/// ||f||_{mu_0}^2 = int f^2 dmu_0 by quadrature.
double mu_norm_sq(const Model& model0, const PeriodicFunction& f,
                  std::size_t grid_size = 4096);

}  // namespace driftbench
