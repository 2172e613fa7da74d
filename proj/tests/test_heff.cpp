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

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

namespace {

using namespace thermodj;

constexpr double kTol = 1e-10;
constexpr double kPi = std::numbers::pi;

const BooleanOracle& fb() {
  static const BooleanOracle f = parse_function("x2*x3 ^ x4", 3);
  return f;
}

TEST(EffectiveHamiltonian, IdentityHasZeroPhases) {
  const auto h = effective_hamiltonian(DenseOperator::identity(3), 2.0);
  for (double p : h.phases) EXPECT_EQ(p, 0.0);
  EXPECT_TRUE(decompose_diagonal(h, 3).empty());
}

TEST(EffectiveHamiltonian, PrincipalBranchMapsMinusOneToPi) {
  const auto h = effective_hamiltonian(controlled_oracle(fb()), 1.0);
  const double expected[] = {0, 0, 0, 0, 0, 0, 0, 0, 0, kPi, 0, kPi, 0, kPi, kPi, 0};
  ASSERT_EQ(h.phases.size(), 16u);
  for (int j = 0; j < 16; ++j) EXPECT_NEAR(h.phases[j], expected[j], 1e-15) << j;
}

TEST(EffectiveHamiltonian, RejectsNonDiagonalAndBadShift) {
  EXPECT_THROW(effective_hamiltonian(spin_rotation(1, 1, Axis::X, 0.4), 1.0), std::invalid_argument);
  const std::vector<int> wrong(3, 0);
  EXPECT_THROW(effective_hamiltonian(DenseOperator::identity(2), 1.0, wrong), std::invalid_argument);
  EXPECT_THROW(effective_hamiltonian(DenseOperator::identity(2), 0.0), std::invalid_argument);
}

TEST(DecomposeDiagonal, PublishedHamiltonianForBalancedFunction) {
  const double tau = 0.5;
  const auto cu = controlled_oracle(fb());
  const auto h = decompose_diagonal(effective_hamiltonian(cu, tau, algebraic_normal_form_shift(cu)), 4);
  const auto published = parse_operator_sum(
                             "1.5 - 3*I1z - I2z - I3z - 2*I4z + 2*I1z*I2z + 2*I1z*I3z + 2*I2z*I3z + 4*I1z*I4z"
                             " - 4*I1z*I2z*I3z",
                             4) *
                         Complex{kPi / (4 * tau)};
  EXPECT_TRUE(h.approx_equal(published)) << h.to_string();
  EXPECT_TRUE(glycine_fb_effective_hamiltonian(tau).approx_equal(published));
}

TEST(DecomposeDiagonal, PublishedHamiltonianReproducesOracle) {
  for (double tau : {1.0, 0.01, 3.7}) {
    const auto u = exp_commuting_zsum(glycine_fb_effective_hamiltonian(tau), tau);
    EXPECT_LT(oracle::phase_distance(u.matrix(), controlled_oracle(fb()).matrix()), kTol);
  }
}

TEST(DecomposeDiagonal, PrincipalBranchRoundTripsAndNeedsAFourSpinTerm) {
  const auto cu = controlled_oracle(fb());
  const auto h = decompose_diagonal(effective_hamiltonian(cu, 1.0), 4);
  EXPECT_LT(oracle::phase_distance(exp_commuting_zsum(h, 1.0).matrix(), cu.matrix()), kTol);
  EXPECT_NE(h.coefficient(AxisString(4, Axis::Z)), Complex(0.0));
}

TEST(DecomposeDiagonal, ReconstructsRandomDiagonals) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int m = 1; m <= 4; ++m) {
    DiagonalHamiltonian h;
    h.tau = 0.3;
    for (int j = 0; j < (1 << m); ++j) h.phases.push_back(u(rng));
    const auto terms = decompose_diagonal(h, m);
    const Matrix dense = oracle::dense(terms);
    for (int j = 0; j < (1 << m); ++j) EXPECT_NEAR(dense(j, j).real() * h.tau, h.phases[j], 1e-12);
    EXPECT_TRUE(terms.approx_equal(oracle::decompose(dense, m)));
    // Z-strings commute pairwise.
    for (const auto& [a, ca] : terms.terms()) {
      for (const auto& [b, cb] : terms.terms()) {
        const Matrix ma = oracle::product_operator(a), mb = oracle::product_operator(b);
        EXPECT_LT((ma * mb - mb * ma).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
  EXPECT_THROW(decompose_diagonal(DiagonalHamiltonian{1.0, {0, 0, 0}}, 2), std::invalid_argument);
}

TEST(DecomposeDiagonal, EveryThreeInputOracleRoundTrips) {
  for (std::uint64_t idx = 0; idx < 256; ++idx) {
    const auto cu = controlled_oracle(BooleanOracle::from_index(3, idx));
    for (bool anf : {false, true}) {
      std::vector<int> shift;
      if (anf) shift = algebraic_normal_form_shift(cu);
      const auto h = decompose_diagonal(effective_hamiltonian(cu, 1.0, shift), 4);
      EXPECT_LT(oracle::phase_distance(exp_commuting_zsum(h, 1.0).matrix(), cu.matrix()), kTol) << idx;
    }
  }
}

TEST(AlgebraicNormalFormShift, WeightBoundedByDegree) {
  // x2 x3 x4 has degree 3, so the controlled oracle has degree 4.
  const auto cubic = controlled_oracle(parse_function("x2 x3 x4", 3));
  const auto h = decompose_diagonal(effective_hamiltonian(cubic, 1.0, algebraic_normal_form_shift(cubic)), 4);
  EXPECT_NE(h.coefficient(AxisString(4, Axis::Z)), Complex(0.0));
  // A degree-1 function only needs bilinear terms.
  const auto linear = controlled_oracle(parse_function("x2 ^ x4", 3));
  const auto hl = decompose_diagonal(effective_hamiltonian(linear, 1.0, algebraic_normal_form_shift(linear)), 4);
  for (const auto& [axes, c] : hl.terms()) EXPECT_LE(std::count(axes.begin(), axes.end(), Axis::Z), 2);
}

TEST(AlgebraicNormalFormShift, RejectsNonSignDiagonals) {
  EXPECT_THROW(algebraic_normal_form_shift(spin_rotation(1, 1, Axis::Z, 0.3)), std::invalid_argument);
}

TEST(DropIdentity, RemovesConstantTerm) {
  const auto d = drop_identity(glycine_fb_effective_hamiltonian(1.0));
  EXPECT_EQ(d.terms.size(), 9u);
  EXPECT_NEAR(d.identity_coefficient, 1.5 * kPi / 4, kTol);
  const auto twice = drop_identity(d.terms);
  EXPECT_TRUE(twice.terms.approx_equal(d.terms));
  EXPECT_EQ(twice.identity_coefficient, 0.0);
  const auto only = drop_identity(OperatorSum::identity(2, 3.0));
  EXPECT_TRUE(only.terms.empty());
  EXPECT_EQ(only.identity_coefficient, 3.0);
}

TEST(ZsumText, RoundTrips) {
  const auto h = glycine_fb_effective_hamiltonian(0.25);
  std::stringstream ss;
  write_zsum(ss, h);
  EXPECT_NE(ss.str().find("\t1110\n"), std::string::npos);
  const auto back = read_zsum(ss);
  EXPECT_TRUE(back.approx_equal(h, 1e-12));
  std::stringstream bad("1.0\t10x1\n");
  EXPECT_THROW(read_zsum(bad), std::invalid_argument);
  std::stringstream transverse;
  EXPECT_THROW(write_zsum(transverse, parse_operator_sum("I1x", 1)), std::invalid_argument);
}

}  // namespace
