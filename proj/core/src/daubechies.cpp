// SPDX-License-Identifier: Apache-2.0
#include "driftbench/daubechies.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <algorithm>
#include <complex>
#include <stdexcept>

namespace driftbench::wavelets {

namespace {

using cd = std::complex<double>;

// Roots of a monic-normalised polynomial via the companion matrix.
std::vector<cd> poly_roots(const std::vector<double>& coeffs) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -coeffs[i] / coeffs[deg];
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
  std::vector<cd> roots(deg);
  for (int i = 0; i < deg; ++i) roots[i] = es.eigenvalues()[i];
  return roots;
}

std::vector<cd> poly_mul(const std::vector<cd>& a, const std::vector<cd>& b) {
  std::vector<cd> out(a.size() + b.size() - 1, cd(0.0, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace

std::vector<double> daubechies_filter(int order) {
  if (order < 1 || order > 20)
    throw std::invalid_argument("daubechies_filter: order must be in [1, 20]");
  const int N = order;
  if (N == 1) {
    const double v = 1.0 / std::sqrt(2.0);
    return {v, v};  // Haar
  }

  // P(y) = sum_{k<N} C(N-1+k, k) y^k, the Daubechies polynomial.
  std::vector<double> P(N);
  P[0] = 1.0;
  for (int k = 1; k < N; ++k) P[k] = P[k - 1] * static_cast<double>(N - 1 + k) / k;

  // Each root y maps to a conjugate/reciprocal quadruple of z-roots via
  // y = (2 - z - 1/z)/4; keep the root inside the unit disk.
  std::vector<cd> m0 = {cd(1.0, 0.0)};
  for (const cd& y : poly_roots(P)) {
    const cd b = 2.0 - 4.0 * y;
    const cd disc = std::sqrt(b * b - 4.0);
    cd z1 = (b + disc) / 2.0;
    cd z2 = (b - disc) / 2.0;
    cd zin = (std::abs(z1) <= std::abs(z2)) ? z1 : z2;
    m0 = poly_mul(m0, {-zin / (1.0 - zin), cd(1.0, 0.0) / (1.0 - zin)});
  }
  for (int i = 0; i < N; ++i) m0 = poly_mul(m0, {cd(0.5, 0.0), cd(0.5, 0.0)});

  if (m0.size() != static_cast<std::size_t>(2 * N))
    throw std::logic_error("daubechies_filter: unexpected filter length");
  std::vector<double> h(2 * N);
  const double s = std::sqrt(2.0);
  for (int k = 0; k < 2 * N; ++k) h[k] = s * m0[k].real();
  // Extremal-phase convention: energy concentrated at the head.  The other
  // spectral-factorisation branch yields the mirror image; flip if needed.
  double front = 0.0, back = 0.0;
  for (int k = 0; k < N; ++k) {
    front += h[k] * h[k];
    back += h[2 * N - 1 - k] * h[2 * N - 1 - k];
  }
  if (back > front) std::reverse(h.begin(), h.end());
  return h;
}

double ScalingTable::interp(const std::vector<double>& tab, double x) const {
  if (x <= 0.0 || x >= static_cast<double>(support)) return 0.0;
  const double t = std::ldexp(x, levels);  // x * 2^levels
  const auto j = static_cast<std::size_t>(t);
  if (j + 1 >= tab.size()) return 0.0;
  const double frac = t - static_cast<double>(j);
  return tab[j] + frac * (tab[j + 1] - tab[j]);
}

ScalingTable cascade(const std::vector<double>& h, int levels) {
  const int taps = static_cast<int>(h.size());
  const int support = taps - 1;
  ScalingTable table;
  table.levels = levels;
  table.support = support;

  const std::size_t n = static_cast<std::size_t>(support) << levels;
  table.phi.assign(n + 1, 0.0);
  const double rt2 = std::sqrt(2.0);

  // Integer-point values solve phi(i) = sqrt(2) sum_k h_k phi(2i - k): the
  // 1-eigenvector of the transfer matrix, normalised to sum 1.
  {
    const int m = support - 1;  // unknowns phi(1) .. phi(support-1)
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i <= m; ++i)
      for (int j = 1; j <= m; ++j) {
        const int k = 2 * i - j;
        if (k >= 0 && k < taps) T(i - 1, j - 1) = rt2 * h[k];
      }
    Eigen::EigenSolver<Eigen::MatrixXd> es(T);
    int best = 0;
    double bestdist = 1e300;
    for (int i = 0; i < m; ++i) {
      const double dist = std::abs(es.eigenvalues()[i] - cd(1.0, 0.0));
      if (dist < bestdist) {
        bestdist = dist;
        best = i;
      }
    }
    Eigen::VectorXcd v = es.eigenvectors().col(best);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += v[i].real();
    const std::size_t step = std::size_t{1} << levels;
    for (int i = 1; i <= m; ++i)
      table.phi[static_cast<std::size_t>(i) * step] = v[i - 1].real() / sum;
  }

  // Refinement pass j fills the odd multiples of 2^-j from the coarser grid.
  for (int j = 1; j <= levels; ++j) {
    const std::size_t step = std::size_t{1} << (levels - j);
    for (std::size_t i = step; i < n; i += 2 * step) {
      // x = i * 2^-levels; phi(x) = sqrt(2) sum_k h_k phi(2x - k)
      double acc = 0.0;
      for (int k = 0; k < taps; ++k) {
        const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(2 * i) -
                                   (static_cast<std::ptrdiff_t>(k) << levels);
        if (idx > 0 && idx < static_cast<std::ptrdiff_t>(n))
          acc += h[k] * table.phi[static_cast<std::size_t>(idx)];
      }
      table.phi[i] = rt2 * acc;
    }
  }

  // psi(x) = sqrt(2) sum_k g_k phi(2x - k), g_k = (-1)^k h_{taps-1-k}.
  table.psi.assign(n + 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < taps; ++k) {
      const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(2 * i) -
                                 (static_cast<std::ptrdiff_t>(k) << levels);
      if (idx > 0 && idx < static_cast<std::ptrdiff_t>(n)) {
        const double g = (k % 2 == 0 ? 1.0 : -1.0) * h[static_cast<std::size_t>(taps - 1 - k)];
        acc += g * table.phi[static_cast<std::size_t>(idx)];
      }
    }
    table.psi[i] = rt2 * acc;
  }
  return table;
}

}  // namespace driftbench::wavelets
