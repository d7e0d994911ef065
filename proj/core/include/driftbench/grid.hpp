// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace driftbench {

/// Wrap x into [0, 1).
inline double wrap01(double x) {
  double w = x - std::floor(x);
  return w < 1.0 ? w : 0.0;  // floor rounding can yield exactly 1.0
}

/// Minimal periodic representative of an increment: wrap z into (-1/2, 1/2].
inline double wrap_half(double z) { return z - std::ceil(z - 0.5); }

/// A 1-periodic real function on [0, 1).  Wraps its argument before calling
/// the underlying evaluator, so f(x) == f(x mod 1) for all real x.
class PeriodicFunction {
 public:
  PeriodicFunction() : eval_([](double) { return 0.0; }) {}
  explicit PeriodicFunction(std::function<double(double)> eval)
      : eval_(std::move(eval)) {}

  double operator()(double x) const { return eval_(wrap01(x)); }

  static PeriodicFunction constant(double c) {
    return PeriodicFunction([c](double) { return c; });
  }
  static PeriodicFunction zero() { return constant(0.0); }

 private:
  std::function<double(double)> eval_;
};

/// Values of a periodic function tabulated at nodes j/n, j = 0..n (both
/// endpoints stored; v[0] and v[n] describe the same point of the circle).
/// Evaluation between nodes is linear interpolation.
class GridFn {
 public:
  GridFn() = default;
  GridFn(std::size_t n, double fill) : values_(n + 1, fill) {}
  explicit GridFn(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw std::invalid_argument("GridFn: need >= 2 nodes");
  }

  static GridFn tabulate(const PeriodicFunction& f, std::size_t n) {
    std::vector<double> v(n + 1);
    for (std::size_t j = 0; j <= n; ++j) v[j] = f(static_cast<double>(j) / n);
    v[n] = v[0];
    return GridFn(std::move(v));
  }

  std::size_t intervals() const { return values_.size() - 1; }
  double node(std::size_t j) const { return static_cast<double>(j) / intervals(); }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double operator()(double x) const {
    const double n = static_cast<double>(intervals());
    const double t = wrap01(x) * n;
    const std::size_t j = std::min(static_cast<std::size_t>(t), intervals() - 1);
    const double frac = t - static_cast<double>(j);
    return values_[j] + frac * (values_[j + 1] - values_[j]);
  }

  PeriodicFunction as_function() const {
    GridFn copy = *this;
    return PeriodicFunction([g = std::move(copy)](double x) { return g(x); });
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::vector<double> values_;
};

/// Composite trapezoid integral of samples at uniform spacing h.
inline double trapezoid(const std::vector<double>& v, double h) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t j = 1; j + 1 < v.size(); ++j) s += v[j];
  return s * h;
}

/// Cumulative trapezoid: out[j] = integral of v over [x_0, x_j].
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& v, double h) {
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t j = 1; j < v.size(); ++j)
    out[j] = out[j - 1] + 0.5 * h * (v[j - 1] + v[j]);
  return out;
}

/// Trapezoid quadrature of f over [0,1] on n+1 uniform nodes.
inline double integrate01(const std::function<double(double)>& f, std::size_t n) {
  double s = 0.5 * (f(0.0) + f(1.0));
  for (std::size_t j = 1; j < n; ++j) s += f(static_cast<double>(j) / n);
  return s / static_cast<double>(n);
}

/// 4th-order central differences of periodic samples (v[0] == v[n] assumed);
/// returns the derivative at the same nodes.  The stencil weights sum to zero
/// over the circle, so the discrete integral of the result vanishes exactly.
inline std::vector<double> periodic_derivative4(const std::vector<double>& v) {
  const std::size_t n = v.size() - 1;
  const double h = 1.0 / static_cast<double>(n);
  std::vector<double> d(v.size());
  auto at = [&](std::ptrdiff_t j) {
    std::ptrdiff_t m = j % static_cast<std::ptrdiff_t>(n);
    if (m < 0) m += static_cast<std::ptrdiff_t>(n);
    return v[static_cast<std::size_t>(m)];
  };
  for (std::size_t j = 0; j < n; ++j) {
    const auto i = static_cast<std::ptrdiff_t>(j);
    d[j] = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h);
  }
  d[n] = d[0];
  return d;
}

}  // namespace driftbench
