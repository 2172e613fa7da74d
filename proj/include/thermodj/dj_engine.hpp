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

#include "thermodj/oracle.hpp"
#include "thermodj/spin_algebra.hpp"
#include "thermodj/thermal.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace thermodj {

enum class DjDecision { Constant0, Constant1, Balanced, Indeterminate };

inline const char* to_string(DjDecision d) {
  switch (d) {
    case DjDecision::Constant0: return "constant-0";
    case DjDecision::Constant1: return "constant-1";
    case DjDecision::Balanced: return "balanced";
    case DjDecision::Indeterminate: return "indeterminate";
  }
  return "?";
}

/// Relative tolerance on <I_1x> when matching the three decision values.
inline constexpr double kDecisionTolerance = 1e-9;

struct DjOutcome {
  /// Tr(I_1x rho_2), in the same units as alpha_1.
  double expectation = 0.0;
  DjDecision decision = DjDecision::Indeterminate;
  /// Traceless part of rho_2, i.e. (alpha_1 / N) cU_f I_1x cU_f^dag.
  OperatorSum rho2_terms{1};
};

/// Maps <I_1x> onto {alpha/4 -> Constant0, -alpha/4 -> Constant1, 0 -> Balanced}.
inline DjDecision decide(double expectation, double alpha1) {
  const double tol = kDecisionTolerance * std::abs(alpha1);
  if (alpha1 == 0.0) return DjDecision::Indeterminate;
  if (std::abs(expectation - alpha1 / 4) < tol) return DjDecision::Constant0;
  if (std::abs(expectation + alpha1 / 4) < tol) return DjDecision::Constant1;
  if (std::abs(expectation) < tol) return DjDecision::Balanced;
  return DjDecision::Indeterminate;
}

/// (alpha_1 / 4) (2^n - 2 ones(f)) / 2^n.
inline double dj_closed_form(const BooleanOracle& f, double alpha1) {
  const double n_inputs = static_cast<double>(f.size());
  return alpha1 / 4 * (n_inputs - 2.0 * static_cast<double>(f.count_ones())) / n_inputs;
}

using ControlledOracleBuilder = std::function<DenseOperator(const BooleanOracle&)>;

inline DenseOperator controlled_oracle(const BooleanOracle& f) { return controlled_u(u_f(f)); }

/// Applies cU_f to rho_1 and reads out <I_1x>. `build` is called exactly once.
inline DjOutcome run_dj(const SpinSystem& sys, const BooleanOracle& f, const ThermalParams& p,
                        const ControlledOracleBuilder& build = controlled_oracle) {
  const int m = sys.num_spins();
  if (m != f.num_inputs() + 1) {
    throw std::invalid_argument("spin system has " + std::to_string(m) + " spins; oracle needs " +
                                std::to_string(f.num_inputs() + 1));
  }
  ThermalParams full = p;
  full.reduced_mode = false;
  const DenseOperator rho1 = to_dense(prepare_rho1(prepare_rho0(sys, full)));
  const DenseOperator cu = build(f);
  const DenseOperator rho2 = conjugate(cu, rho1);
  const DenseOperator i1x = to_dense(OperatorSum::spin(m, 1, Axis::X));

  DjOutcome out;
  out.expectation = expectation(i1x, rho2);
  out.decision = decide(out.expectation, p.alpha(1));
  out.rho2_terms = matrix_to_terms(rho2).traceless_part();
  return out;
}

/// Product-operator form of cU_f I_1x cU_f^dag (traceless part).
inline OperatorSum rho2_product_operators(const BooleanOracle& f) {
  const int m = f.num_inputs() + 1;
  const DenseOperator cu = controlled_oracle(f);
  return conjugate_terms(cu, OperatorSum::spin(m, 1, Axis::X)).traceless_part();
}

/// One pair of outer products |0,j><1,j| and |1,j><0,j| in the expansion of I_1x.
struct OuterProductPair {
  std::uint32_t j = 0;
  std::uint32_t control0 = 0;  // basis index of |0,j>
  std::uint32_t control1 = 0;  // basis index of |1,j>
};

/// I_1x = (1/2) sum_j (|0,j><1,j| + |1,j><0,j|) over the 2^(m-1) indices j.
/// The identity is checked against the product-operator matrix before returning.
inline std::vector<OuterProductPair> outer_product_expansion(int m) {
  detail::check_spin_count(m);
  const std::uint32_t half = std::uint32_t{1} << (m - 1);
  std::vector<OuterProductPair> pairs;
  pairs.reserve(half);
  Matrix acc = Matrix::Zero(2 * half, 2 * half);
  for (std::uint32_t j = 0; j < half; ++j) {
    pairs.push_back({j, j, half + j});
    acc(j, half + j) += 0.5;
    acc(half + j, j) += 0.5;
  }
  const DenseOperator expected = term_to_matrix({1.0, OperatorSum::single_axes(m, 1, Axis::X)}, m);
  if (DenseOperator(m, acc).max_abs_diff(expected) > kCompareTolerance) {
    throw std::logic_error("outer-product expansion does not reproduce I_1x");
  }
  return pairs;
}

}  // namespace thermodj
