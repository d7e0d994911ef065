// SPDX-License-Identifier: Apache-2.0
/**
 * @file wavelet.hpp
 * @brief Periodised wavelet approximation spaces S_m on the circle [0,1).
 *
 * S_m is spanned by the constant function psi_{-1,0} == 1 together with the
 * periodised wavelets psi_{lk}, 0 <= l < m, 0 <= k < 2^l, so dim(S_m) = 2^m.
 * Two families are provided: periodised extremal-phase Daubechies wavelets
 * (default, order 8) and a trigonometric-polynomial family with the same
 * indexing.  Inner products use composite trapezoid quadrature on a uniform
 * dyadic grid; Daubechies point values come from a cascade table at 2^-16
 * resolution with linear interpolation in between.
 */
#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

#include "driftbench/daubechies.hpp"
#include "driftbench/grid.hpp"

namespace driftbench {

enum class WaveletFamily { daubechies_periodized, fourier_trig };

/// Coefficients {c_lk : -1 <= l < m, 0 <= k < 2^l} of an element of S_m.
/// Flat storage in canonical order: slot 0 is (-1,0); level l >= 0 occupies
/// slots [2^l, 2^{l+1}).
class CoefficientVector {
 public:
  CoefficientVector() : m_(0), c_(1, 0.0) {}
  explicit CoefficientVector(int m)
      : m_(m), c_(std::size_t{1} << m, 0.0) {
    if (m < 0) throw std::invalid_argument("CoefficientVector: m >= 0 required");
  }
  CoefficientVector(int m, std::vector<double> flat) : m_(m), c_(std::move(flat)) {
    if (c_.size() != (std::size_t{1} << m))
      throw std::invalid_argument("CoefficientVector: need exactly 2^m entries");
  }

  int resolution() const { return m_; }
  std::size_t size() const { return c_.size(); }

  static std::size_t slot(int l, int k) {
    if (l == -1) {
      if (k != 0) throw std::out_of_range("CoefficientVector: k must be 0 at l=-1");
      return 0;
    }
    if (l < -1 || k < 0 || k >= (1 << l))
      throw std::out_of_range("CoefficientVector: index out of range");
    return (std::size_t{1} << l) + static_cast<std::size_t>(k);
  }
  /// Inverse of slot(): slot 0 -> (-1,0), slot j -> (l, j - 2^l).
  static std::pair<int, int> level_of(std::size_t slot_index);

  double operator()(int l, int k) const {
    const std::size_t s = slot(l, k);
    return s < c_.size() ? c_[s] : 0.0;
  }
  double& at(int l, int k) { return c_.at(slot(l, k)); }
  const std::vector<double>& flat() const { return c_; }
  std::vector<double>& flat() { return c_; }

  /// Zero-padded copy at a (weakly) larger resolution.
  CoefficientVector padded(int m) const;

 private:
  int m_;
  std::vector<double> c_;
};

/// Immutable basis object; safe to share across threads once constructed.
class WaveletBasis {
 public:
  struct Options {
    WaveletFamily family = WaveletFamily::daubechies_periodized;
    int order = 8;           // Daubechies vanishing moments
    int max_level = 10;      // levels -1 .. max_level-1 are admissible
    std::size_t quad_points = std::size_t{1} << 14;
    int table_levels = 16;   // cascade grid resolution 2^-table_levels
  };

  explicit WaveletBasis(const Options& opts);
  WaveletBasis() : WaveletBasis(Options{}) {}

  WaveletFamily family() const { return opts_.family; }
  int max_level() const { return opts_.max_level; }
  std::size_t quad_points() const { return opts_.quad_points; }
  int order() const { return opts_.order; }

  /// Point value of the periodised basis function psi_{lk} at x (x is wrapped
  /// into [0,1)).  Throws std::domain_error on an out-of-range index.
  double evaluate(int l, int k, double x) const;

  /// Numerical derivative of psi_{lk} (analytic for the trig family, table
  /// differences for Daubechies).  Used only for sup-norm diagnostics.
  double evaluate_deriv(int l, int k, double x) const;

  /// max_x sum_k |psi_{lk}(x)| and the same for derivatives, per level;
  /// used to convert coefficient bounds into C^1 bounds.
  double level_envelope(int l) const;
  double level_deriv_envelope(int l) const;

 private:
  Options opts_;
  std::shared_ptr<const wavelets::ScalingTable> table_;  // Daubechies only
  double psi_sup_ = 0.0;
  void check_index(int l, int k) const;
};

/// L^2 analysis: coefficients <f, psi_lk> for -1 <= l < m, by trapezoid
/// quadrature on basis.quad_points() nodes.  synthesize(analyze(f)) is the
/// L^2 projection pi_m f.
CoefficientVector analyze(const PeriodicFunction& f, int m, const WaveletBasis& basis);

/// Synthesis x -> sum c_lk psi_lk(x).
PeriodicFunction synthesize(const CoefficientVector& c, const WaveletBasis& basis);

/// Point value of the synthesised series without building a closure.
double synthesize_at(const CoefficientVector& c, const WaveletBasis& basis, double x);

/// Besov B^s_{2,infty} sequence norm:
/// |c_{-1,0}| + max_{0<=l<m} 2^{ls} (sum_k c_lk^2)^{1/2}.
double besov_norm(const CoefficientVector& c, double s);

/// Diagnostic B^s_{infty,1} sequence norm:
/// |c_{-1,0}| + sum_l 2^{l(s+1/2)} max_k |c_lk|.
double besov_infty1_norm(const CoefficientVector& c, double s);

/// Quadrature L^2 distance ||f - g||_2 on [0,1].
double l2_distance(const PeriodicFunction& f, const PeriodicFunction& g,
                   std::size_t quad_points = std::size_t{1} << 14);

/// Parseval distance between two coefficient vectors (zero-padding the
/// shorter one).
double coeff_l2_distance(const CoefficientVector& a, const CoefficientVector& b);

}  // namespace driftbench
