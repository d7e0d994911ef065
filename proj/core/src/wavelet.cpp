// SPDX-License-Identifier: Apache-2.0
#include "driftbench/wavelet.hpp"

#include <algorithm>
#include <cmath>

namespace driftbench {

std::pair<int, int> CoefficientVector::level_of(std::size_t slot_index) {
  if (slot_index == 0) return {-1, 0};
  int l = 0;
  while ((std::size_t{2} << l) <= slot_index) ++l;
  return {l, static_cast<int>(slot_index - (std::size_t{1} << l))};
}

CoefficientVector CoefficientVector::padded(int m) const {
  if (m < m_) throw std::invalid_argument("padded: target resolution too small");
  CoefficientVector out(m);
  std::copy(c_.begin(), c_.end(), out.c_.begin());
  return out;
}

WaveletBasis::WaveletBasis(const Options& opts) : opts_(opts) {
  if (opts_.max_level < 0) throw std::invalid_argument("WaveletBasis: max_level >= 0");
  if (opts_.family == WaveletFamily::daubechies_periodized) {
    auto h = wavelets::daubechies_filter(opts_.order);
    table_ = std::make_shared<const wavelets::ScalingTable>(
        wavelets::cascade(h, opts_.table_levels));
    for (double v : table_->psi) psi_sup_ = std::max(psi_sup_, std::abs(v));
  }
}

void WaveletBasis::check_index(int l, int k) const {
  if (l < -1 || l >= opts_.max_level) throw std::domain_error("wavelet level out of range");
  if (l == -1) {
    if (k != 0) throw std::domain_error("wavelet shift out of range");
  } else if (k < 0 || k >= (1 << l)) {
    throw std::domain_error("wavelet shift out of range");
  }
}

namespace {

// Trig family layout: non-constant slot j (0-based within the level blocks)
// alternates cos/sin with increasing frequency, so level l holds slots
// [2^l - 1, 2^{l+1} - 1).
double trig_eval(int l, int k, double x) {
  const std::size_t j = ((std::size_t{1} << l) - 1) + static_cast<std::size_t>(k);
  const double root2 = std::sqrt(2.0);
  const double freq = (j % 2 == 0) ? static_cast<double>(j / 2 + 1)
                                   : static_cast<double>((j + 1) / 2);
  const double arg = 2.0 * M_PI * freq * x;
  return (j % 2 == 0) ? root2 * std::cos(arg) : root2 * std::sin(arg);
}

double trig_eval_deriv(int l, int k, double x) {
  const std::size_t j = ((std::size_t{1} << l) - 1) + static_cast<std::size_t>(k);
  const double root2 = std::sqrt(2.0);
  const double freq = (j % 2 == 0) ? static_cast<double>(j / 2 + 1)
                                   : static_cast<double>((j + 1) / 2);
  const double w = 2.0 * M_PI * freq;
  const double arg = w * x;
  return (j % 2 == 0) ? -root2 * w * std::sin(arg) : root2 * w * std::cos(arg);
}

}  // namespace

double WaveletBasis::evaluate(int l, int k, double x) const {
  check_index(l, k);
  if (l == -1) return 1.0;
  x = wrap01(x);
  if (opts_.family == WaveletFamily::fourier_trig) return trig_eval(l, k, x);

  // Periodisation: psi_lk(x) = 2^{l/2} sum_j psi(2^l (x + j) - k).
  const double scale = std::ldexp(1.0, l);  // 2^l
  const double t = scale * x - static_cast<double>(k);
  const double sup = static_cast<double>(table_->support);
  const auto jmin = static_cast<long>(std::ceil(-t / scale));
  const auto jmax = static_cast<long>(std::floor((sup - t) / scale));
  double acc = 0.0;
  for (long j = jmin; j <= jmax; ++j)
    acc += table_->eval_psi(t + static_cast<double>(j) * scale);
  return std::sqrt(scale) * acc;
}

double WaveletBasis::evaluate_deriv(int l, int k, double x) const {
  check_index(l, k);
  if (l == -1) return 0.0;
  x = wrap01(x);
  if (opts_.family == WaveletFamily::fourier_trig) return trig_eval_deriv(l, k, x);
  const double h = std::ldexp(1.0, -(opts_.table_levels - 2));
  return (evaluate(l, k, x + h) - evaluate(l, k, x - h)) / (2.0 * h);
}

double WaveletBasis::level_envelope(int l) const {
  if (l == -1) return 1.0;
  if (opts_.family == WaveletFamily::fourier_trig) {
    // sum of |cos| + |sin| envelopes; crude but only used for diagnostics
    return std::sqrt(2.0) * static_cast<double>(1 << l);
  }
  // Overlap count at a point is at most min(2^l, support), each term bounded
  // by 2^{l/2} ||psi||_inf; sharpen by scanning a grid.
  const int probes = 1 << 10;
  double best = 0.0;
  for (int i = 0; i < probes; ++i) {
    const double x = (i + 0.5) / probes;
    double s = 0.0;
    for (int k = 0; k < (1 << l); ++k) s += std::abs(evaluate(l, k, x));
    best = std::max(best, s);
  }
  return best;
}

double WaveletBasis::level_deriv_envelope(int l) const {
  if (l == -1) return 0.0;
  const int probes = 1 << 10;
  double best = 0.0;
  for (int i = 0; i < probes; ++i) {
    const double x = (i + 0.5) / probes;
    double s = 0.0;
    for (int k = 0; k < (1 << l); ++k) s += std::abs(evaluate_deriv(l, k, x));
    best = std::max(best, s);
  }
  return best;
}

CoefficientVector analyze(const PeriodicFunction& f, int m, const WaveletBasis& basis) {
  if (m > basis.max_level())
    throw std::domain_error("analyze: resolution exceeds basis max_level");
  const std::size_t q = basis.quad_points();
  std::vector<double> fv(q);
  for (std::size_t i = 0; i < q; ++i) fv[i] = f(static_cast<double>(i) / q);

  CoefficientVector c(m);
  for (std::size_t s = 0; s < c.size(); ++s) {
    auto [l, k] = CoefficientVector::level_of(s);
    double acc = 0.0;
    for (std::size_t i = 0; i < q; ++i)
      acc += fv[i] * basis.evaluate(l, k, static_cast<double>(i) / q);
    c.flat()[s] = acc / static_cast<double>(q);
  }
  return c;
}

double synthesize_at(const CoefficientVector& c, const WaveletBasis& basis, double x) {
  double acc = 0.0;
  for (std::size_t s = 0; s < c.size(); ++s) {
    const double coef = c.flat()[s];
    if (coef == 0.0) continue;
    auto [l, k] = CoefficientVector::level_of(s);
    acc += coef * basis.evaluate(l, k, x);
  }
  return acc;
}

PeriodicFunction synthesize(const CoefficientVector& c, const WaveletBasis& basis) {
  return PeriodicFunction(
      [c, &basis](double x) { return synthesize_at(c, basis, x); });
}

double besov_norm(const CoefficientVector& c, double s) {
  double norm = std::abs(c(-1, 0));
  double sup = 0.0;
  for (int l = 0; l < c.resolution(); ++l) {
    double e = 0.0;
    for (int k = 0; k < (1 << l); ++k) {
      const double v = c(l, k);
      e += v * v;
    }
    sup = std::max(sup, std::pow(2.0, l * s) * std::sqrt(e));
  }
  return norm + sup;
}

double besov_infty1_norm(const CoefficientVector& c, double s) {
  double norm = std::abs(c(-1, 0));
  for (int l = 0; l < c.resolution(); ++l) {
    double mx = 0.0;
    for (int k = 0; k < (1 << l); ++k) mx = std::max(mx, std::abs(c(l, k)));
    norm += std::pow(2.0, l * (s + 0.5)) * mx;
  }
  return norm;
}

double l2_distance(const PeriodicFunction& f, const PeriodicFunction& g,
                   std::size_t quad_points) {
  double acc = 0.0;
  for (std::size_t i = 0; i < quad_points; ++i) {
    const double x = static_cast<double>(i) / quad_points;
    const double d = f(x) - g(x);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(quad_points));
}

double coeff_l2_distance(const CoefficientVector& a, const CoefficientVector& b) {
  const std::size_t n = std::max(a.size(), b.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double va = s < a.size() ? a.flat()[s] : 0.0;
    const double vb = s < b.size() ? b.flat()[s] : 0.0;
    acc += (va - vb) * (va - vb);
  }
  return std::sqrt(acc);
}

}  // namespace driftbench
