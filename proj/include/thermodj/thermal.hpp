// Copyright 2026 The thermodj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "thermodj/spin_algebra.hpp"

#include <numbers>
#include <vector>

namespace thermodj {

/// First-order Boltzmann polarizations alpha_l = hbar omega_l / kT, one per
/// spin. The high-temperature expansion assumes |alpha_l| << 1; nothing here
/// enforces it. Spins beyond the end of `alphas` have alpha = 0.
struct ThermalParams {
  std::vector<double> alphas{1.0};
  /// Drop the identity part, keeping only the traceless deviation.
  bool reduced_mode = false;

  double alpha(int spin) const {
    return spin >= 1 && spin <= static_cast<int>(alphas.size()) ? alphas[spin - 1] : 0.0;
  }

  static ThermalParams uniform(int m, double alpha) { return {std::vector<double>(m, alpha), false}; }
};

/// (1/N)(1 - sum_l alpha_l I_lz), N = 2^m.
inline OperatorSum thermal_state(const SpinSystem& sys, const ThermalParams& p) {
  const int m = sys.num_spins();
  const double inv_n = std::ldexp(1.0, -m);
  OperatorSum rho(m);
  if (!p.reduced_mode) rho.add(AxisString(m, Axis::E), inv_n);
  for (int l = 1; l <= m; ++l) rho.add(OperatorSum::single_axes(m, l, Axis::Z), -p.alpha(l) * inv_n);
  return rho;
}

/// (1/N)(1 + alpha_1 I_1z). Stands in for the gradient/transfer preparation
/// as an ideal filter: every polarization except spin 1 is discarded and the
/// sign of the surviving term is flipped relative to the thermal state.
inline OperatorSum prepare_rho0(const SpinSystem& sys, const ThermalParams& p) {
  const int m = sys.num_spins();
  const double inv_n = std::ldexp(1.0, -m);
  OperatorSum rho(m);
  if (!p.reduced_mode) rho.add(AxisString(m, Axis::E), inv_n);
  rho.add(OperatorSum::single_axes(m, 1, Axis::Z), p.alpha(1) * inv_n);
  return rho;
}

/// The 90-degree y pulse on spin 1 that turns I_1z into I_1x.
inline DenseOperator readout_pulse(int m, int spin = 1) {
  return spin_rotation(m, spin, Axis::Y, std::numbers::pi / 2);
}

/// rho0 rotated by exp(-i (pi/2) I_1y): (1/N)(1 + alpha_1 I_1x).
inline OperatorSum prepare_rho1(const OperatorSum& rho0) {
  return conjugate_terms(readout_pulse(rho0.num_spins()), rho0);
}

/// F_z = sum_l I_lz.
inline OperatorSum total_z(int m) {
  OperatorSum fz(m);
  for (int l = 1; l <= m; ++l) fz.add(OperatorSum::single_axes(m, l, Axis::Z), 1.0);
  return fz;
}

}  // namespace thermodj
