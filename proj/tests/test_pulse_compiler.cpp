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

#include <algorithm>
#include <numbers>
#include <random>

namespace {

using namespace thermodj;

constexpr double kPi = std::numbers::pi;
constexpr double kTol = 1e-10;

Matrix term(int m, std::initializer_list<std::pair<int, Axis>> factors) {
  AxisString axes(m, Axis::E);
  for (auto [spin, a] : factors) axes[spin - 1] = a;
  return oracle::product_operator(axes);
}

Matrix rot(int m, int spin, Axis a, double angle) { return oracle::single_spin_rotation(m, spin, a, angle); }

// exp(-i theta 2 I_kz I_lz) from the oracle.
Matrix zz(int m, int k, int l, double theta) { return oracle::zz_rotation(m, k, l, 2 * theta); }

// The relay product as displayed, with factors listed left to right.
std::vector<Matrix> relay_factors(int m, int k, int r) {
  const Matrix y_plus_x = term(m, {{k, Axis::Y}}) + term(m, {{r, Axis::X}});
  return {rot(m, k, Axis::X, kPi / 2), zz(m, k, r, kPi / 2), oracle::propagator(y_plus_x, kPi / 2),
          zz(m, k, r, kPi / 2), rot(m, r, Axis::Y, kPi / 2)};
}

std::vector<Matrix> trilinear_factors(int m, int k, int mm) {
  return {rot(m, k, Axis::X, kPi / 2), zz(m, k, mm, kPi / 2), rot(m, k, Axis::Y, kPi / 2)};
}

Matrix product(const std::vector<Matrix>& factors, bool reversed) {
  Matrix out = Matrix::Identity(factors.front().rows(), factors.front().cols());
  if (reversed) {
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) out = out * *it;
  } else {
    for (const auto& f : factors) out = out * f;
  }
  return out;
}

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

const BooleanOracle& fb() {
  static const BooleanOracle f = parse_function("x2*x3 ^ x4", 3);
  return f;
}

TEST(Conjugations, RelayIdentityHoldsOnlyInWrittenOrder) {
  const auto factors = relay_factors(4, 1, 2);
  const Matrix v = product(factors, false);
  const Matrix lhs = v * term(4, {{2, Axis::Z}, {4, Axis::Z}}) * v.adjoint();
  EXPECT_LT(max_diff(lhs, term(4, {{1, Axis::Z}, {4, Axis::Z}})), kTol);
  const Matrix w = product(factors, true);
  EXPECT_GT(max_diff(w * term(4, {{2, Axis::Z}, {4, Axis::Z}}) * w.adjoint(), term(4, {{1, Axis::Z}, {4, Axis::Z}})),
            0.1);
}

TEST(Conjugations, TrilinearIdentityHoldsOnlyInWrittenOrder) {
  const auto factors = trilinear_factors(4, 1, 3);
  const Matrix w = product(factors, false);
  const Matrix target = 2.0 * term(4, {{1, Axis::Z}, {2, Axis::Z}, {3, Axis::Z}});
  EXPECT_LT(max_diff(w * term(4, {{1, Axis::Z}, {2, Axis::Z}}) * w.adjoint(), target), kTol);
  const Matrix r = product(factors, true);
  EXPECT_GT(max_diff(r * term(4, {{1, Axis::Z}, {2, Axis::Z}}) * r.adjoint(), target), 0.1);
}

TEST(Conjugations, GateListsLowerToTheWrittenProducts) {
  const SpinSystem g = oracle::glycine();
  detail::Lowering lower(g, CompileOptions{});
  const Matrix v = simulate(lower.lower(detail::relay_gates(1, 2))).matrix();
  EXPECT_LT(oracle::phase_distance(v, product(relay_factors(4, 1, 2), false)), 1e-9);
  const Matrix w = simulate(lower.lower(detail::trilinear_gates(1, 3))).matrix();
  EXPECT_LT(oracle::phase_distance(w, product(trilinear_factors(4, 1, 3), false)), 1e-9);
}

TEST(CompileLinear, UpdatesFrameOnly) {
  const auto p = compile_linear(4, 1, -3 * kPi / 4);
  EXPECT_TRUE(p.events().empty());
  EXPECT_DOUBLE_EQ(p.frame(1), -3 * kPi / 4);
  EXPECT_EQ(p.total_duration(), 0.0);
  EXPECT_TRUE(compile_linear(4, 2, 0.0).empty());
  PulseProgram two = compile_linear(2, 1, 0.3);
  two.then(compile_linear(2, 1, 0.4));
  EXPECT_NEAR(two.frame(1), 0.7, 1e-15);
  EXPECT_LT(oracle::phase_distance(simulate(two).matrix(), rot(2, 1, Axis::Z, 0.7)), kTol);
}

TEST(CompileLinear, MatchesPublishedLinearTerm) {
  const double tau = 2.0;
  const double coeff = -3 * kPi / (4 * tau);
  const auto p = compile_term({Axis::Z, Axis::E, Axis::E, Axis::E}, coeff, tau, oracle::glycine());
  EXPECT_DOUBLE_EQ(p.frame(1), -3 * kPi / 4);
}

TEST(CompileBilinear, DelayIsHalfOverJ) {
  const SpinSystem g = oracle::glycine();
  const auto p23 = compile_bilinear(2, 3, kPi / 2, g);
  ASSERT_EQ(p23.size(), 1u);
  const auto& d = std::get<Delay>(p23.events()[0]);
  EXPECT_NEAR(d.duration, 1.0 / (2 * 67.7), 1e-15);
  EXPECT_NEAR(d.duration * 1e3, 7.386, 1e-3);
  EXPECT_EQ(d.decoupled_spins, (std::vector<int>{1, 4}));
  ASSERT_EQ(d.active_couplings.size(), 1u);
  EXPECT_EQ(d.active_couplings[0].j_hz, 67.7);
  const auto p12 = compile_bilinear(1, 2, kPi / 2, g);
  EXPECT_NEAR(p12.total_duration(), 1.0 / (2 * 65.2), 1e-15);
  EXPECT_NEAR(1e3 / (2 * 65.2), 7.669, 1e-3);
  EXPECT_TRUE(compile_bilinear(1, 2, 0.0, g).events().empty());
}

TEST(CompileBilinear, NegativeAnglesUsePiPulses) {
  const SpinSystem g = oracle::glycine();
  for (double angle : {-kPi / 2, -0.3, 0.3, 1.1}) {
    const auto p = compile_bilinear(1, 3, angle, g);
    EXPECT_LT(verify(p, DenseOperator::from_matrix(zz(4, 1, 3, angle))).distance, 1e-9);
    EXPECT_EQ(p.size(), angle < 0 ? 3u : 1u);
  }
}

TEST(CompileBilinear, UncoupledPairsRelayThroughSmallestSpin) {
  const SpinSystem g = oracle::glycine();
  const auto direct = compile_bilinear(1, 4, kPi, g);
  const auto relayed = compile_relayed_bilinear(1, 4, 2, kPi, g);
  EXPECT_LT(oracle::phase_distance(simulate(direct).matrix(), simulate(relayed).matrix()), 1e-12);
  EXPECT_LT(verify(direct, DenseOperator::from_matrix(zz(4, 1, 4, kPi))).distance, 1e-9);
  for (double angle : {0.4, -1.3}) {
    EXPECT_LT(verify(compile_bilinear(4, 1, angle, g), DenseOperator::from_matrix(zz(4, 1, 4, angle))).distance, 1e-9);
  }
  bool relay_delay_seen = false;
  for (const auto& e : direct.events())
    if (const auto* d = std::get_if<Delay>(&e); d && d->active_couplings[0].k == 2 && d->active_couplings[0].l == 4)
      relay_delay_seen = true;
  EXPECT_TRUE(relay_delay_seen);
}

TEST(CompileBilinear, RelayErrors) {
  const SpinSystem g = oracle::glycine();
  EXPECT_THROW(compile_relayed_bilinear(1, 4, 3, kPi, g), CompileError);
  EXPECT_THROW(compile_bilinear(2, 2, kPi, g), CompileError);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(3, 3);
  j(0, 1) = j(1, 0) = 10;
  const SpinSystem chain({"a", "b", "c"}, {0, 0, 0}, j);
  EXPECT_THROW(compile_bilinear(1, 3, kPi, chain), CompileError);
  const auto same = compile_relayed_bilinear(1, 2, 1, 0.5, chain);
  EXPECT_LT(verify(same, DenseOperator::from_matrix(zz(3, 1, 2, 0.5))).distance, 1e-9);
}

TEST(CompileTrilinear, MatchesDenseExponential) {
  const SpinSystem g = oracle::glycine();
  const Matrix gen = 4.0 * term(4, {{1, Axis::Z}, {2, Axis::Z}, {3, Axis::Z}});
  for (double angle : {kPi / 4, -kPi / 4, 0.9}) {
    const auto p = compile_trilinear(1, 2, 3, angle, g);
    EXPECT_LT(verify(p, DenseOperator::from_matrix(oracle::propagator(gen, angle))).distance, 1e-9);
  }
  EXPECT_TRUE(compile_trilinear(1, 2, 3, 0.0, g).events().empty());
}

TEST(CompileTrilinear, PublishedCoefficient) {
  const double tau = 1.0;
  const double c = -4 * kPi / (4 * tau);
  const AxisString axes{Axis::Z, Axis::Z, Axis::Z, Axis::E};
  const auto p = compile_term(axes, c, tau, oracle::glycine());
  const Matrix target = oracle::propagator(c * oracle::product_operator(axes), tau);
  EXPECT_LT(verify(p, DenseOperator::from_matrix(target)).distance, 1e-9);
}

TEST(CompileTrilinear, UnsupportedTopology) {
  // 1-2, 3-4 only: no spin of {1, 2, 4} couples to both others.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4, 4);
  j(0, 1) = j(1, 0) = 10;
  j(2, 3) = j(3, 2) = 10;
  const SpinSystem pairs({"a", "b", "c", "d"}, {0, 0, 0, 0}, j);
  EXPECT_THROW(compile_trilinear(1, 2, 4, 0.5, pairs), CompileError);
  // Glycine's {2, 3, 4}: spin 2 couples to both 3 and 4.
  const Matrix gen = 4.0 * term(4, {{2, Axis::Z}, {3, Axis::Z}, {4, Axis::Z}});
  const auto p = compile_trilinear(2, 3, 4, 0.7, oracle::glycine());
  EXPECT_LT(verify(p, DenseOperator::from_matrix(oracle::propagator(gen, 0.7))).distance, 1e-9);
}

TEST(CompileHamiltonian, BalancedFunctionEndToEnd) {
  const double tau = 1.0;
  const auto h = glycine_fb_effective_hamiltonian(tau);
  const auto r = compile_hamiltonian(h, oracle::glycine(), tau);
  const DenseOperator cu = controlled_oracle(fb());
  EXPECT_TRUE(r.raw_report.passed) << r.raw_report.distance;
  EXPECT_TRUE(r.report.passed) << r.report.distance;
  EXPECT_LT(verify(r.raw, cu).distance, 1e-9);
  EXPECT_LT(verify(r.program, cu).distance, 1e-9);
  EXPECT_LE(r.program.size(), r.raw.size());
  EXPECT_NEAR(r.dropped_identity, 1.5 * kPi / 4, kTol);
}

TEST(CompileHamiltonian, EmptyAndErrors) {
  const auto r = compile_hamiltonian(OperatorSum(4), oracle::glycine(), 1.0);
  EXPECT_TRUE(r.program.empty());
  EXPECT_TRUE(r.report.passed);
  try {
    compile_hamiltonian(parse_operator_sum("I1z*I2z*I3z*I4z", 4), oracle::glycine(), 1.0);
    FAIL();
  } catch (const CompileError& e) {
    EXPECT_NE(std::string(e.what()).find("I1z*I2z*I3z*I4z"), std::string::npos);
  }
  EXPECT_THROW(compile_hamiltonian(parse_operator_sum("I1x", 4), oracle::glycine(), 1.0), CompileError);
  EXPECT_THROW(compile_hamiltonian(parse_operator_sum("I1z", 3), oracle::glycine(), 1.0), CompileError);
}

TEST(CompileHamiltonian, TermOrderDoesNotMatter) {
  const double tau = 1.0;
  const auto h = glycine_fb_effective_hamiltonian(tau).traceless_part();
  auto terms = h.to_terms();
  const SpinSystem g = oracle::glycine();
  const DenseOperator cu = controlled_oracle(fb());
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(terms.begin(), terms.end(), rng);
    PulseProgram p(4);
    for (const auto& t : terms) p.then(compile_term(t.axes, t.coefficient.real(), tau, g));
    EXPECT_LT(verify(p, cu).distance, 1e-9);
    EXPECT_LT(verify(streamline(p), cu).distance, 1e-9);
  }
}

TEST(CompileHamiltonian, EveryOracleCompilesOrIsRejected) {
  const SpinSystem g = oracle::glycine();
  int compiled = 0, weight4 = 0, topology = 0;
  for (std::uint64_t idx = 0; idx < 256; ++idx) {
    const DenseOperator cu = controlled_oracle(BooleanOracle::from_index(3, idx));
    const auto h = decompose_diagonal(effective_hamiltonian(cu, 1.0, algebraic_normal_form_shift(cu)), 4);
    const bool has_weight4 = h.coefficient(AxisString(4, Axis::Z)) != Complex(0.0);
    try {
      const auto r = compile_hamiltonian(h, g, 1.0);
      EXPECT_FALSE(has_weight4) << idx;
      EXPECT_LT(verify(r.program, cu).distance, 1e-9) << idx;
      ++compiled;
    } catch (const CompileError& e) {
      const std::string what = e.what();
      if (has_weight4) {
        EXPECT_NE(what.find("I1z*I2z*I3z*I4z"), std::string::npos) << what;
        ++weight4;
      } else {
        // Glycine has no spin coupled to both 3 and 4, nor to both 1 and 4.
        EXPECT_NE(what.find("unsupported topology for I1z*I3z*I4z"), std::string::npos) << what;
        ++topology;
      }
    }
  }
  // Tables of odd weight have algebraic degree 3 and need a four-spin term.
  EXPECT_EQ(weight4, 128);
  EXPECT_EQ(compiled + topology, 128);
  EXPECT_GE(compiled, 64);
}

TEST(CompileHamiltonian, ExtraDecoupledSpinIsUntouched) {
  const double tau = 1.0;
  const auto h4 = glycine_fb_effective_hamiltonian(tau);
  OperatorSum h5(5);
  for (const auto& [axes, c] : h4.terms()) {
    AxisString a = axes;
    a.push_back(Axis::E);
    h5.add(a, c);
  }
  const double extra[] = {40.0, 25.0, 90.0, 12.0};
  const SpinSystem g5 = oracle::glycine().with_extra_spin("H5", 500.0, extra, "1H");
  const auto r = compile_hamiltonian(h5, g5, tau);
  for (const auto& e : r.program.events()) {
    if (const auto* d = std::get_if<Delay>(&e)) {
      EXPECT_TRUE(std::find(d->decoupled_spins.begin(), d->decoupled_spins.end(), 5) != d->decoupled_spins.end());
    }
  }
  const Matrix expected = Eigen::kroneckerProduct(controlled_oracle(fb()).matrix(), Matrix::Identity(2, 2)).eval();
  EXPECT_LT(oracle::phase_distance(simulate(r.program).matrix(), expected), 1e-9);
}

TEST(CompileHamiltonian, GridModeRoundsToNearestMultiple) {
  const double tau = 1.0;
  CompileOptions opts;
  opts.grid = true;
  opts.grid_delta = 81.75e-6;
  const auto r = compile_hamiltonian(glycine_fb_effective_hamiltonian(tau), oracle::glycine(), tau, opts);
  ASSERT_FALSE(r.rounding.empty());
  for (const auto& e : r.program.events()) {
    if (const auto* d = std::get_if<Delay>(&e)) {
      const double steps = d->duration / opts.grid_delta;
      EXPECT_NEAR(steps, std::round(steps), 1e-9);
    }
  }
  for (const auto& g : r.rounding) {
    EXPECT_LE(std::abs(g.emitted - g.requested), opts.grid_delta / 2 + 1e-15);
    const double steps = g.emitted / opts.grid_delta;
    EXPECT_NEAR(steps, std::round(steps), 1e-9);
  }
  const auto exact = compile_hamiltonian(glycine_fb_effective_hamiltonian(tau), oracle::glycine(), tau);
  EXPECT_GT(r.report.distance, exact.report.distance);
}

TEST(PulseKinds, SelectiveCarbonPulsesCarryCompensation) {
  const SpinSystem g = oracle::glycine();
  EXPECT_EQ(detail::pulse_kind(g, 1), PulseKind::Selective);
  EXPECT_EQ(detail::pulse_kind(g, 2), PulseKind::Selective);
  EXPECT_EQ(detail::pulse_kind(g, 3), PulseKind::Hard);
  EXPECT_EQ(detail::pulse_kind(g, 4), PulseKind::Hard);
  EXPECT_DOUBLE_EQ(*detail::compensation_hz(g, 1), -24462.0);
  EXPECT_DOUBLE_EQ(*detail::compensation_hz(g, 2), 12231.0);
  EXPECT_FALSE(detail::compensation_hz(g, 3).has_value());

  const auto r = compile_hamiltonian(glycine_fb_effective_hamiltonian(1.0), g, 1.0);
  for (const auto& e : r.raw.events()) {
    if (const auto* rot = std::get_if<Rotation>(&e); rot && rot->spin <= 2) {
      EXPECT_EQ(rot->kind, PulseKind::Selective);
      EXPECT_TRUE(rot->duration == 224e-6 || rot->duration == 250e-6);
    }
  }
}

}  // namespace
