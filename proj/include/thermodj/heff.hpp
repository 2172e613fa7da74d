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

#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermodj {

/// Diagonal Hamiltonian H stored as the dimensionless angles H_jj * tau.
struct DiagonalHamiltonian {
  double tau = 1.0;
  std::vector<double> phases;

  int num_spins() const {
    int m = 0;
    while ((std::size_t{1} << m) < phases.size()) ++m;
    return m;
  }
};

/// H = (i / tau) log cU on the principal branch: phi_j = -arg(cU_jj) in
/// (-pi, pi], so a -1 entry maps to +pi. `branch_shift`, when given, adds
/// 2 pi k_j to each phase to select another branch.
inline DiagonalHamiltonian effective_hamiltonian(const DenseOperator& cu, double tau,
                                                 std::span<const int> branch_shift = {}) {
  if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
  if (!cu.is_diagonal()) throw std::invalid_argument("effective_hamiltonian: operator is not diagonal");
  if (!cu.is_unitary()) throw std::invalid_argument("effective_hamiltonian: operator is not unitary");
  if (!branch_shift.empty() && branch_shift.size() != static_cast<std::size_t>(cu.dim())) {
    throw std::invalid_argument("branch shift length does not match dimension");
  }
  DiagonalHamiltonian h;
  h.tau = tau;
  h.phases.resize(static_cast<std::size_t>(cu.dim()));
  for (Eigen::Index j = 0; j < cu.dim(); ++j) {
    double phi = -std::arg(cu(j, j));
    if (phi <= -std::numbers::pi + kPruneTolerance) phi += 2 * std::numbers::pi;
    if (std::abs(phi) < kPruneTolerance) phi = 0.0;
    if (!branch_shift.empty()) phi += 2 * std::numbers::pi * branch_shift[static_cast<std::size_t>(j)];
    h.phases[static_cast<std::size_t>(j)] = phi;
  }
  return h;
}

/// Branch shift for a +-1 diagonal unitary that lifts the algebraic normal
/// form of its sign pattern to integers: the phase at j becomes pi * g(j)
/// with g = sum of the ANF monomials taken over the integers. The resulting
/// Z-string expansion has weight at most the algebraic degree of the pattern.
inline std::vector<int> algebraic_normal_form_shift(const DenseOperator& cu) {
  if (!cu.is_diagonal()) throw std::invalid_argument("branch shift needs a diagonal operator");
  const auto dim = static_cast<std::size_t>(cu.dim());
  std::vector<int> sign_bit(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const Complex d = cu(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
    if (std::abs(d - 1.0) < kCompareTolerance) sign_bit[j] = 0;
    else if (std::abs(d + 1.0) < kCompareTolerance) sign_bit[j] = 1;
    else throw std::invalid_argument("branch shift needs diagonal entries of +1 or -1");
  }
  // Moebius transform over GF(2) gives the ANF coefficients.
  std::vector<int> anf = sign_bit;
  for (std::size_t h = 1; h < dim; h <<= 1)
    for (std::size_t j = 0; j < dim; ++j)
      if (j & h) anf[j] ^= anf[j ^ h];
  // Integer subset sums of the monomials.
  std::vector<int> lifted = anf;
  for (std::size_t h = 1; h < dim; h <<= 1)
    for (std::size_t j = 0; j < dim; ++j)
      if (j & h) lifted[j] += lifted[j ^ h];
  std::vector<int> shift(dim);
  for (std::size_t j = 0; j < dim; ++j) shift[j] = (lifted[j] - sign_bit[j]) / 2;
  return shift;
}

/// Expands a diagonal Hamiltonian over products of I_kz. Coefficients are in
/// rad/s (phases / tau): c_S = Tr(B_S H) / Tr(B_S^2), B_S = prod_{k in S} I_kz.
inline OperatorSum decompose_diagonal(const DiagonalHamiltonian& h, int m) {
  detail::check_spin_count(m);
  const std::size_t dim = std::size_t{1} << m;
  if (h.phases.size() != dim) {
    throw std::invalid_argument("phase vector length " + std::to_string(h.phases.size()) + " != 2^" +
                                std::to_string(m));
  }
  std::vector<double> v(h.phases.begin(), h.phases.end());
  detail::walsh_hadamard(v);
  OperatorSum out(m);
  for (std::uint32_t zm = 0; zm < dim; ++zm) {
    const int weight = std::popcount(zm);
    const double c = v[zm] * std::ldexp(1.0, weight - m) / h.tau;
    if (std::abs(c) < kPruneTolerance) continue;
    out.add(detail::axes_of(m, 0, zm), c);
  }
  return out;
}

struct IdentityDropped {
  OperatorSum terms{1};
  /// Coefficient of the removed identity term; it contributes the global
  /// phase exp(-i c tau) to the propagator.
  double identity_coefficient = 0.0;
};

inline IdentityDropped drop_identity(const OperatorSum& terms) {
  const Complex c = terms.coefficient(AxisString(terms.num_spins(), Axis::E));
  return {terms.traceless_part(), c.real()};
}

/// The four-spin effective Hamiltonian chosen for f_b = x2 x3 ^ x4 in the
/// glycine demonstration, coefficients in rad/s:
/// (pi/4tau){3/2 - 3I1z - I2z - I3z - 2I4z + 2I1zI2z + 2I1zI3z + 2I2zI3z + 4I1zI4z - 4I1zI2zI3z}.
inline OperatorSum glycine_fb_effective_hamiltonian(double tau) {
  const double s = std::numbers::pi / (4 * tau);
  OperatorSum h = parse_operator_sum(
      "1.5 - 3*I1z - I2z - I3z - 2*I4z + 2*I1z*I2z + 2*I1z*I3z + 2*I2z*I3z + 4*I1z*I4z - 4*I1z*I2z*I3z", 4);
  return h * Complex{s};
}

/// One term per line: "<coefficient>\t<mask>", mask a 0/1 string with spin 1
/// first and 1 marking an I_z factor.
inline void write_zsum(std::ostream& os, const OperatorSum& terms) {
  os.precision(17);
  for (const auto& [axes, c] : terms.terms()) {
    std::string mask;
    for (Axis a : axes) {
      if (a != Axis::E && a != Axis::Z) throw std::invalid_argument("write_zsum: term is not a Z-string");
      mask += a == Axis::Z ? '1' : '0';
    }
    os << c.real() << '\t' << mask << '\n';
  }
}

inline OperatorSum read_zsum(std::istream& is) {
  std::string line;
  std::optional<OperatorSum> out;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double c = 0;
    std::string mask;
    if (!(ls >> c >> mask)) throw std::invalid_argument("zsum line " + std::to_string(lineno) + ": malformed");
    AxisString axes;
    for (char ch : mask) {
      if (ch != '0' && ch != '1') throw std::invalid_argument("zsum line " + std::to_string(lineno) + ": bad mask");
      axes.push_back(ch == '1' ? Axis::Z : Axis::E);
    }
    if (!out) out.emplace(static_cast<int>(axes.size()));
    out->add(axes, c);
  }
  if (!out) throw std::invalid_argument("zsum: no terms");
  return *out;
}

}  // namespace thermodj
