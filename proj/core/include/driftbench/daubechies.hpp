// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace driftbench::wavelets {

/// Extremal-phase Daubechies low-pass filter with `order` vanishing moments
/// (2*order taps, normalised so the taps sum to sqrt(2)).  Built by spectral
/// factorisation: the roots of the Daubechies polynomial are found via the
/// companion-matrix eigenproblem and the minimum-phase half is kept.
std::vector<double> daubechies_filter(int order);

/// Scaling function phi and mother wavelet psi of the filter `h`, tabulated
/// by cascade refinement at dyadic points j * 2^-levels on the support
/// [0, 2N-1].  Values at non-dyadic points are linear interpolations.
struct ScalingTable {
  std::vector<double> phi;   // (2N-1)*2^levels + 1 samples
  std::vector<double> psi;   // same layout
  int levels = 0;            // dyadic refinement depth
  int support = 0;           // 2N-1

  double eval_phi(double x) const { return interp(phi, x); }
  double eval_psi(double x) const { return interp(psi, x); }

 private:
  double interp(const std::vector<double>& tab, double x) const;
};

ScalingTable cascade(const std::vector<double>& h, int levels);

}  // namespace driftbench::wavelets
