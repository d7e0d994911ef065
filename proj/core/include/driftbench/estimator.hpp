// SPDX-License-Identifier: Apache-2.0
/**
 * @file estimator.hpp
 * @brief Minimum-contrast drift estimation over sup-norm-capped wavelet
 * spaces: empirical norm/loss, dyadic resolution selection, the constrained
 * least-squares fit, and the plug-in separation test.
 */
#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <variant>

#include "driftbench/simulate.hpp"
#include "driftbench/wavelet.hpp"

namespace driftbench {

/// Regression view of the data: design points X_{kDelta} (periodised) and
/// responses Delta^{-1}(X_{(k+1)Delta} - X_{kDelta}) for k = 1..n-1.  The
/// k = 0 term is dropped, and the final sample has no forward increment, so
/// the usable index set is shared by the empirical norm and loss; this keeps
/// the expansion gamma_n(u) - gamma_n(0) = ||u||_n^2 - 2<y, u>_n exact.
struct RegressionData {
  std::vector<double> x;  // periodised design points
  std::vector<double> y;  // scaled increments
};

RegressionData regression_view(const Observations& obs);

/// ||u||_n^2: average of u(X_{kDelta})^2 over the design points.
double empirical_norm(const PeriodicFunction& u, const Observations& obs);

/// gamma_n(u): average squared regression residual.
double empirical_loss(const PeriodicFunction& u, const Observations& obs);

struct RateSchedule {
  double s = 1.0;    // assumed smoothness, >= 1
  double L1 = 0.5;   // bracket D in [L1 (nD)^{1/(1+2s)}, L2 (nD)^{1/(1+2s)}]
  double L2 = 1.0;
};

/// Contraction-rate radius eps_n = (n Delta)^{-s/(1+2s)} log(n Delta)^{1/2}.
double epsilon_rate(std::size_t n, double Delta, double s);

struct ResolutionChoice {
  int level = 1;
  bool clamped = false;   // pushed into [1, max_level]
  bool widened = false;   // bracket was empty; nearest dyadic level taken
};

/// Dyadic level with 2^l in the rate bracket; per the worked convention the
/// largest admissible level wins when both bracket endpoints are dyadic.
ResolutionChoice select_resolution(std::size_t n, double Delta,
                                   const RateSchedule& schedule, int max_level);

struct EstimatorConfig {
  std::variant<int, RateSchedule> resolution;  // fixed level or rate rule
  double K0 = 1.0;
  const WaveletBasis* basis = nullptr;
  std::size_t sup_check_points = 4096;
};

struct FitResult {
  CoefficientVector coeffs;
  int level = 0;
  double gamma_n = 0.0;          // empirical loss at the returned fit
  bool constraint_active = false;  // sup-norm rescale was applied
  bool degenerate = false;         // rank-deficient design, min-norm solution
  bool clamped = false;
  bool widened = false;
};

/// b~_n = argmin over S~_{l_n} of gamma_n, via the Gram normal equations with
/// a rank-revealing (complete orthogonal) factorisation; rank-deficient
/// systems take the minimum-norm solution.  If the unconstrained minimiser
/// exceeds K0+1 in sup-norm on the check grid it is rescaled into the ball
/// and flagged.  Throws std::invalid_argument when n < dim(S_{l_n}).
FitResult fit_minimum_contrast(const Observations& obs, const EstimatorConfig& config);

/// Indicator of ||synthesize(bhat) - b_ref||_2 > C * eps_n.
int plug_in_test(const CoefficientVector& bhat, const PeriodicFunction& b_ref,
                 double C, double eps_n, const WaveletBasis& basis);

/// Basis design matrix: out(i, slot) = psi_slot(points[i]).
Eigen::MatrixXd build_design(const WaveletBasis& basis, int m,
                             const std::vector<double>& points);

}  // namespace driftbench
