// SPDX-License-Identifier: Apache-2.0
#include "driftbench/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace driftbench {

DriftSpec DriftSpec::closed_form(PeriodicFunction fn, PeriodicFunction dfn, double K0) {
  return DriftSpec{std::move(fn), std::move(dfn), K0};
}

DriftSpec DriftSpec::from_function(const PeriodicFunction& fn, double K0,
                                   std::size_t grid_n) {
  GridFn tab = GridFn::tabulate(fn, grid_n);
  auto dvals = periodic_derivative4(tab.values());
  DriftSpec spec;
  spec.f = fn;
  spec.df = GridFn(std::move(dvals)).as_function();
  spec.K0 = K0;
  return spec;
}

DriftSpec DriftSpec::zero(double K0) {
  return DriftSpec{PeriodicFunction::zero(), PeriodicFunction::zero(), K0};
}

SigmaSpec SigmaSpec::constant(double value) {
  if (value <= 0.0) throw std::invalid_argument("SigmaSpec: sigma must be positive");
  return SigmaSpec{PeriodicFunction::constant(value), PeriodicFunction::zero(),
                   value, value};
}

ThetaCheck check_theta_membership(const DriftSpec& drift, std::size_t grid_n) {
  double sup_b = 0.0, sup_db = 0.0;
  for (std::size_t j = 0; j < grid_n; ++j) {
    const double x = static_cast<double>(j) / grid_n;
    sup_b = std::max(sup_b, std::abs(drift.f(x)));
    sup_db = std::max(sup_db, std::abs(drift.df(x)));
  }
  ThetaCheck out;
  out.c1_norm = sup_b + sup_db;
  out.ok = out.c1_norm <= drift.K0 + 1e-9;
  return out;
}

InvariantDensity::InvariantDensity(std::vector<double> values, double H_b)
    : grid_(std::move(values)), H_b_(H_b) {
  const auto& v = grid_.values();
  const double h = 1.0 / static_cast<double>(grid_.intervals());
  for (double x : v)
    if (x < 0.0) throw std::invalid_argument("InvariantDensity: negative value");
  cdf_ = cumulative_trapezoid(v, h);
  const double total = cdf_.back();
  if (total <= 0.0) throw std::invalid_argument("InvariantDensity: zero mass");
  for (double& c : cdf_) c /= total;
  cdf_.front() = 0.0;
  cdf_.back() = 1.0;
}

double InvariantDensity::cdf(double x) const {
  const std::size_t n = grid_.intervals();
  const double t = std::clamp(x, 0.0, 1.0) * static_cast<double>(n);
  const std::size_t j = std::min(static_cast<std::size_t>(t), n - 1);
  const double frac = t - static_cast<double>(j);
  return cdf_[j] + frac * (cdf_[j + 1] - cdf_[j]);
}

double InvariantDensity::cdf_inv(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  // lower_bound gives the first node with cdf >= u: ties resolve to the
  // lower node of the bracketing interval.
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.begin()) return 0.0;
  const auto j = static_cast<std::size_t>(it - cdf_.begin());
  const double c0 = cdf_[j - 1], c1 = cdf_[j];
  const double n = static_cast<double>(grid_.intervals());
  const double x0 = static_cast<double>(j - 1) / n;
  if (c1 <= c0) return x0;
  const double x = x0 + (u - c0) / (c1 - c0) / n;
  return std::min(x, 1.0 - 1e-16);
}

Model::Model(ModelParams params, std::size_t grid_n)
    : params_(std::move(params)), n_(grid_n) {
  if (grid_n < 64) throw std::invalid_argument("Model: grid_n >= 64 required");
  std::vector<double> b(n_ + 1), sig(n_ + 1), sig2(n_ + 1), integrand(n_ + 1);
  for (std::size_t j = 0; j <= n_; ++j) {
    const double x = static_cast<double>(j) / n_;
    b[j] = params_.drift.f(x);
    sig[j] = params_.sigma.f(x);
    if (sig[j] <= 0.0) throw std::invalid_argument("Model: sigma must be positive");
    sig2[j] = sig[j] * sig[j];
    integrand[j] = 2.0 * b[j] / sig2[j];
  }
  b[n_] = b[0];
  sig[n_] = sig[0];
  sig2[n_] = sig2[0];
  integrand[n_] = integrand[0];

  const double h = 1.0 / static_cast<double>(n_);
  ib_ = GridFn(cumulative_trapezoid(integrand, h));

  std::vector<double> em(n_ + 1);
  for (std::size_t j = 0; j <= n_; ++j) em[j] = std::exp(-ib_.values()[j]);
  scale_ = GridFn(cumulative_trapezoid(em, h));

  b_ = GridFn(std::move(b));
  sig_ = GridFn(std::move(sig));
  sig2_ = GridFn(std::move(sig2));
  try {
    stationary_ = invariant_density(n_);
  } catch (const std::runtime_error&) {
    // Drift-dominated beyond grid resolution (e.g. vanishing sigma): the
    // model is still usable for simulation from a fixed start; sampling from
    // mu_b will report the failure.
    stationary_ok_ = false;
  }
}

double Model::integrated_drift(double x) const {
  if (x < 0.0 || x > 1.0) throw std::domain_error("integrated_drift: x in [0,1]");
  if (x == 1.0) return ib_.values().back();
  return ib_(x);
}

InvariantDensity Model::invariant_density(std::size_t grid_size) const {
  if (grid_size < 64) throw std::domain_error("invariant_density: grid_size >= 64");

  // Unnormalised density on the cache grid:
  //   p(x) = e^{I_b(x)} / sigma^2(x) * ( e^{I_b(1)} (J(1)-J(x)) + J(x) ),
  // with J(x) = int_0^x e^{-I_b}.  Exponents are shifted before
  // exponentiating so that strongly drift-dominated models stay finite; the
  // overall e^{shift} factor cancels in the normalisation and only enters
  // the reported H_b.
  const auto& ib = ib_.values();
  const double h = 1.0 / static_cast<double>(n_);
  double m = ib[0], M = ib[0];
  for (double v : ib) {
    m = std::min(m, v);
    M = std::max(M, v);
  }
  const double I1 = ib.back();

  // A(x) = int_x^1 e^{I1 - I(y) - (I1 - m)} dy, B(x) = int_0^x e^{m - I(y)} dy
  std::vector<double> em(n_ + 1);
  for (std::size_t j = 0; j <= n_; ++j) em[j] = std::exp(m - ib[j]);
  const std::vector<double> B = cumulative_trapezoid(em, h);
  const double emax = std::max(M + I1 - m, M - m);
  std::vector<double> p(n_ + 1);
  for (std::size_t j = 0; j <= n_; ++j) {
    const double A = B.back() - B[j];
    p[j] = (std::exp(ib[j] + I1 - m - emax) * A + std::exp(ib[j] - m - emax) * B[j]) /
           sig2_.values()[j];
  }
  const double raw_mass = trapezoid(p, h);
  if (!(raw_mass > 0.0) || !std::isfinite(raw_mass))
    throw std::runtime_error("invariant_density: density mass underflowed on the grid");
  const double Hb = raw_mass * std::exp(emax);
  GridFn pfun{std::move(p)};

  // Tabulate at the requested resolution, then renormalise the tabulated
  // values so their own trapezoid integral is exactly 1.
  std::vector<double> vals(grid_size + 1);
  for (std::size_t j = 0; j <= grid_size; ++j)
    vals[j] = pfun(static_cast<double>(j) / grid_size);
  vals[grid_size] = vals[0];
  const double mass = trapezoid(vals, 1.0 / static_cast<double>(grid_size));
  for (double& v : vals) v /= mass;
  return InvariantDensity(std::move(vals), Hb);
}

std::pair<double, double> Model::density_bounds() const {
  const double sL2 = params_.sigma.sigma_L * params_.sigma.sigma_L;
  const double sU2 = params_.sigma.sigma_U * params_.sigma.sigma_U;
  const double piL = sL2 / sU2 * std::exp(-12.0 * params_.drift.K0 / sL2);
  return {piL, 1.0 / piL};
}

double Model::scale_function(double x) const {
  if (x < 0.0 || x > 1.0) throw std::domain_error("scale_function: x in [0,1]");
  if (x == 1.0) return scale_.values().back();
  return scale_(x);
}

double Model::scale_inverse(double y) const {
  const double s1 = scale_.values().back();
  if (y <= 0.0) return 0.0;
  if (y >= s1) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (scale_(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

template <typename F>
double quad_pair(const Model& m0, const Model& m, std::size_t n, F&& term) {
  const InvariantDensity p0 = m0.invariant_density(n);
  const InvariantDensity pb = m.invariant_density(n);
  std::vector<double> v(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double x = static_cast<double>(j) / n;
    v[j] = term(p0(x), pb(x));
  }
  return trapezoid(v, 1.0 / static_cast<double>(n));
}

}  // namespace

double kl_invariant(const Model& model0, const Model& model, std::size_t grid_size) {
  return quad_pair(model0, model, grid_size,
                   [](double p, double q) { return p > 0.0 ? p * std::log(p / q) : 0.0; });
}

double hellinger_invariant(const Model& model0, const Model& model,
                           std::size_t grid_size) {
  return quad_pair(model0, model, grid_size, [](double p, double q) {
    const double d = std::sqrt(p) - std::sqrt(q);
    return d * d;
  });
}

double var_log_invariant_ratio(const Model& model0, const Model& model,
                               std::size_t grid_size) {
  const double mean = kl_invariant(model0, model, grid_size);
  const double second = quad_pair(model0, model, grid_size, [](double p, double q) {
    const double r = std::log(p / q);
    return p * r * r;
  });
  return std::max(0.0, second - mean * mean);
}

double mu_norm_sq(const Model& model0, const PeriodicFunction& f,
                  std::size_t grid_size) {
  const InvariantDensity p0 = model0.invariant_density(grid_size);
  std::vector<double> v(grid_size + 1);
  for (std::size_t j = 0; j <= grid_size; ++j) {
    const double x = static_cast<double>(j) / grid_size;
    const double u = f(x);
    v[j] = u * u * p0(x);
  }
  return trapezoid(v, 1.0 / static_cast<double>(grid_size));
}

}  // namespace driftbench
