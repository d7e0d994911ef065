// SPDX-License-Identifier: Apache-2.0
#include "driftbench/estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace driftbench {

RegressionData regression_view(const Observations& obs) {
  const std::size_t n = obs.n();
  if (n < 2) throw std::invalid_argument("regression_view: need n >= 2");
  RegressionData data;
  data.x.reserve(n - 1);
  data.y.reserve(n - 1);
  for (std::size_t k = 1; k + 1 <= n; ++k) {
    data.x.push_back(wrap01(obs.samples[k]));
    data.y.push_back((obs.samples[k + 1] - obs.samples[k]) / obs.delta);
  }
  return data;
}

double empirical_norm(const PeriodicFunction& u, const Observations& obs) {
  const RegressionData data = regression_view(obs);
  double acc = 0.0;
  for (double x : data.x) {
    const double v = u(x);
    acc += v * v;
  }
  return acc / static_cast<double>(data.x.size());
}

double empirical_loss(const PeriodicFunction& u, const Observations& obs) {
  const RegressionData data = regression_view(obs);
  double acc = 0.0;
  for (std::size_t k = 0; k < data.x.size(); ++k) {
    const double r = data.y[k] - u(data.x[k]);
    acc += r * r;
  }
  return acc / static_cast<double>(data.x.size());
}

double epsilon_rate(std::size_t n, double Delta, double s) {
  const double nd = static_cast<double>(n) * Delta;
  return std::pow(nd, -s / (1.0 + 2.0 * s)) * std::sqrt(std::log(nd));
}

ResolutionChoice select_resolution(std::size_t n, double Delta,
                                   const RateSchedule& schedule, int max_level) {
  const double nd = static_cast<double>(n) * Delta;
  if (nd <= 1.0) throw std::invalid_argument("select_resolution: need n Delta > 1");
  const double target = std::pow(nd, 1.0 / (1.0 + 2.0 * schedule.s));
  const double lo = schedule.L1 * target;
  const double hi = schedule.L2 * target;

  ResolutionChoice out;
  const int lmax_in_bracket = static_cast<int>(std::floor(std::log2(hi) + 1e-12));
  if (std::ldexp(1.0, lmax_in_bracket) >= lo - 1e-12) {
    out.level = lmax_in_bracket;
  } else {
    // Empty bracket: no power of two between lo and hi; take the nearest.
    out.widened = true;
    const double centre = std::sqrt(lo * hi);
    out.level = static_cast<int>(std::lround(std::log2(centre)));
  }
  if (out.level < 1) {
    out.level = 1;
    out.clamped = true;
  }
  if (out.level > max_level) {
    out.level = max_level;
    out.clamped = true;
  }
  return out;
}

Eigen::MatrixXd build_design(const WaveletBasis& basis, int m,
                             const std::vector<double>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << m);
  Eigen::MatrixXd design(n, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    auto [l, k] = CoefficientVector::level_of(static_cast<std::size_t>(j));
    for (Eigen::Index i = 0; i < n; ++i)
      design(i, j) = basis.evaluate(l, k, points[static_cast<std::size_t>(i)]);
  }
  return design;
}

FitResult fit_minimum_contrast(const Observations& obs, const EstimatorConfig& config) {
  if (config.basis == nullptr)
    throw std::invalid_argument("fit_minimum_contrast: basis required");
  const WaveletBasis& basis = *config.basis;

  FitResult out;
  if (std::holds_alternative<int>(config.resolution)) {
    out.level = std::get<int>(config.resolution);
    if (out.level < 0 || out.level > basis.max_level())
      throw std::invalid_argument("fit_minimum_contrast: fixed level out of range");
  } else {
    const auto choice = select_resolution(obs.n(), obs.delta,
                                          std::get<RateSchedule>(config.resolution),
                                          basis.max_level());
    out.level = choice.level;
    out.clamped = choice.clamped;
    out.widened = choice.widened;
  }

  const RegressionData data = regression_view(obs);
  const std::size_t dim = std::size_t{1} << out.level;
  if (data.x.size() < dim)
    throw std::invalid_argument(
        "fit_minimum_contrast: fewer design points than dim(S_l); refusing fit");

  const Eigen::MatrixXd design = build_design(basis, out.level, data.x);
  const Eigen::Map<const Eigen::VectorXd> y(data.y.data(),
                                            static_cast<Eigen::Index>(data.y.size()));
  const double inv_n = 1.0 / static_cast<double>(data.x.size());
  const Eigen::MatrixXd gram = design.transpose() * design * inv_n;
  const Eigen::VectorXd rhs = design.transpose() * y * inv_n;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
  cod.setThreshold(1e-10);
  const Eigen::VectorXd beta = cod.solve(rhs);
  out.degenerate = cod.rank() < static_cast<Eigen::Index>(dim);

  CoefficientVector coeffs(out.level);
  for (std::size_t s = 0; s < dim; ++s) coeffs.flat()[s] = beta(static_cast<Eigen::Index>(s));

  // Enforce membership of S~: rescale into the sup-norm ball when exceeded.
  double sup = 0.0;
  for (std::size_t i = 0; i < config.sup_check_points; ++i) {
    const double x = static_cast<double>(i) / config.sup_check_points;
    sup = std::max(sup, std::abs(synthesize_at(coeffs, basis, x)));
  }
  if (sup > config.K0 + 1.0) {
    const double scale = (config.K0 + 1.0) / sup;
    for (double& v : coeffs.flat()) v *= scale;
    out.constraint_active = true;
  }

  out.coeffs = std::move(coeffs);
  const Eigen::Map<const Eigen::VectorXd> cvec(out.coeffs.flat().data(),
                                               static_cast<Eigen::Index>(dim));
  out.gamma_n = (y - design * cvec).squaredNorm() * inv_n;
  return out;
}

int plug_in_test(const CoefficientVector& bhat, const PeriodicFunction& b_ref,
                 double C, double eps_n, const WaveletBasis& basis) {
  if (eps_n <= 0.0) throw std::invalid_argument("plug_in_test: eps_n > 0 required");
  return l2_distance(synthesize(bhat, basis), b_ref) > C * eps_n ? 1 : 0;
}

}  // namespace driftbench
