// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace driftbench {

/// Streaming mean/variance with enough higher moments to put a standard
/// error on the sample variance as well.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    const double d2 = x - mean_;
    m2_ += d * d2;
    sum3_ += x * x * x;
    sum4_ += x * x * x * x;
    sum2_ += x * x;
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double sd() const { return std::sqrt(variance()); }
  double mean_se() const {
    return n_ > 1 ? sd() / std::sqrt(static_cast<double>(n_)) : 0.0;
  }

  /// Standard error of the sample variance via the 4th central moment:
  /// Var(s^2) ~ (m4 - s^4 (n-3)/(n-1)) / n.
  double variance_se() const {
    if (n_ < 4) return 0.0;
    const double n = static_cast<double>(n_);
    const double mu = mean_;
    const double m4 = sum4_ / n - 4.0 * mu * sum3_ / n + 6.0 * mu * mu * sum2_ / n -
                      3.0 * mu * mu * mu * mu;
    const double s2 = variance();
    const double v = (m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
    return v > 0.0 ? std::sqrt(v) : 0.0;
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0;
  double sum2_ = 0.0, sum3_ = 0.0, sum4_ = 0.0;
};

/// Order statistic with linear interpolation; q in [0,1].  Copies its input.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

/// Least-squares slope of y on x with its standard error.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

inline SlopeFit ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("ols_slope: need matching samples, size >= 2");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("ols_slope: degenerate abscissae");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

}  // namespace driftbench
