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

#include "thermodj/pulse_program.hpp"
#include "thermodj/spin_algebra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace thermodj {

/// Raised when a Hamiltonian cannot be lowered on the given coupling topology.
class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CompileOptions {
  /// Round every delay to the nearest integer multiple of grid_delta.
  bool grid = false;
  double grid_delta = 81.75e-6;
  PulseTiming timing{};
};

/// One delay as requested by the ideal construction and as emitted.
struct GridRounding {
  int k = 0;
  int l = 0;
  double requested = 0.0;
  double emitted = 0.0;
};

namespace detail {

// Gate-level form used before lowering to pulses and delays.
struct GateRotation {
  int spin;
  RotationAxis axis;
  double angle;
};
// exp(-i angle 2 I_kz I_lz)
struct GateZZ {
  int k;
  int l;
  double angle;
};
using Gate = std::variant<GateRotation, GateZZ>;
using GateList = std::vector<Gate>;

inline GateList inverse(const GateList& gates) {
  GateList out(gates.rbegin(), gates.rend());
  for (auto& g : out) std::visit([](auto& x) { x.angle = -x.angle; }, g);
  return out;
}

inline GateList conjugated(const GateList& outer, const GateList& inner) {
  GateList out = inverse(outer);
  out.insert(out.end(), inner.begin(), inner.end());
  out.insert(out.end(), outer.begin(), outer.end());
  return out;
}

// Time-ordered gates of V = exp(-i pi/2 I_kx) exp(-i pi I_kz I_rz)
// exp(-i pi/2 (I_ky + I_rx)) exp(-i pi I_kz I_rz) exp(-i pi/2 I_ry),
// which satisfies V I_rz V^-1 = I_kz.
inline GateList relay_gates(int k, int r) {
  constexpr double h = std::numbers::pi / 2;
  return {GateRotation{r, RotationAxis::Y, h}, GateZZ{k, r, h}, GateRotation{k, RotationAxis::Y, h},
          GateRotation{r, RotationAxis::X, h}, GateZZ{k, r, h}, GateRotation{k, RotationAxis::X, h}};
}

// Time-ordered gates of W = exp(-i pi/2 I_kx) exp(-i pi I_kz I_mz) exp(-i pi/2 I_ky),
// which satisfies W I_kz W^-1 = 2 I_kz I_mz.
inline GateList trilinear_gates(int k, int m) {
  constexpr double h = std::numbers::pi / 2;
  return {GateRotation{k, RotationAxis::Y, h}, GateZZ{k, m, h}, GateRotation{k, RotationAxis::X, h}};
}

inline PulseKind pulse_kind(const SpinSystem& sys, int spin) {
  const auto& nuc = sys.nucleus(spin);
  if (nuc.empty()) return PulseKind::Hard;
  for (int other = 1; other <= sys.num_spins(); ++other)
    if (other != spin && sys.nucleus(other) == nuc) return PulseKind::Selective;
  return PulseKind::Hard;
}

// Mirror frequency that cancels the off-resonance shift a selective pulse
// induces on the nearest homonuclear neighbour.
inline std::optional<double> compensation_hz(const SpinSystem& sys, int spin) {
  std::optional<double> nearest;
  for (int other = 1; other <= sys.num_spins(); ++other) {
    if (other == spin || sys.nucleus(other) != sys.nucleus(spin)) continue;
    const double d = sys.offset_hz(other) - sys.offset_hz(spin);
    if (!nearest || std::abs(d) < std::abs(*nearest)) nearest = d;
  }
  if (!nearest) return std::nullopt;
  return sys.offset_hz(spin) + 2 * *nearest;
}

class Lowering {
 public:
  Lowering(const SpinSystem& sys, const CompileOptions& opts) : sys_(sys), opts_(opts) {}

  PulseProgram lower(const GateList& gates) {
    PulseProgram p(sys_.num_spins(), opts_.timing);
    for (const auto& g : gates) {
      if (const auto* r = std::get_if<GateRotation>(&g)) rotation(p, r->spin, r->axis, r->angle);
      else zz(p, std::get<GateZZ>(g));
    }
    return p;
  }

  const std::vector<GridRounding>& rounding() const { return rounding_; }

 private:
  void rotation(PulseProgram& p, int spin, RotationAxis axis, double angle) {
    if (std::abs(angle) < kPruneTolerance) return;
    Rotation r;
    r.spin = spin;
    r.axis = axis;
    r.angle = angle;
    if (axis != RotationAxis::Z) {
      r.kind = pulse_kind(sys_, spin);
      r.duration = opts_.timing.duration(r.kind, angle);
      if (r.kind == PulseKind::Selective) r.compensate_hz = compensation_hz(sys_, spin);
    }
    p.push(r);
  }

  void zz(PulseProgram& p, const GateZZ& g) {
    if (std::abs(g.angle) < kPruneTolerance) return;
    const double j = sys_.coupling_hz(g.k, g.l);
    if (j == 0.0) {
      throw CompileError("spins " + std::to_string(g.k) + " and " + std::to_string(g.l) + " are not coupled");
    }
    // A delay t realizes exp(-i pi J t 2 I_kz I_lz); a reversed sign needs
    // pi pulses on spin l around the delay.
    const double t_ideal = std::abs(g.angle / (std::numbers::pi * j));
    const bool flip = g.angle / j < 0;
    double t = t_ideal;
    if (opts_.grid) {
      t = std::round(t_ideal / opts_.grid_delta) * opts_.grid_delta;
      rounding_.push_back({g.k, g.l, t_ideal, t});
    }
    if (flip) rotation(p, g.l, RotationAxis::X, std::numbers::pi);
    Delay d;
    d.duration = t;
    d.active_couplings.push_back({std::min(g.k, g.l), std::max(g.k, g.l), j});
    for (int s = 1; s <= sys_.num_spins(); ++s)
      if (s != g.k && s != g.l) d.decoupled_spins.push_back(s);
    p.push(d);
    if (flip) rotation(p, g.l, RotationAxis::X, std::numbers::pi);
  }

  const SpinSystem& sys_;
  const CompileOptions& opts_;
  std::vector<GridRounding> rounding_;
};

inline void check_pair(const SpinSystem& sys, int k, int l) {
  const int m = sys.num_spins();
  if (k < 1 || k > m || l < 1 || l > m) throw CompileError("spin index out of range");
  if (k == l) throw CompileError("bilinear term needs two distinct spins");
}

inline std::optional<int> find_relay(const SpinSystem& sys, int k, int l) {
  for (int r = 1; r <= sys.num_spins(); ++r)
    if (r != k && r != l && sys.coupled(k, r) && sys.coupled(r, l)) return r;
  return std::nullopt;
}

inline GateList bilinear_gates(const SpinSystem& sys, int k, int l, double angle) {
  check_pair(sys, k, l);
  if (std::abs(angle) < kPruneTolerance) return {};
  if (sys.coupled(k, l)) return {GateZZ{k, l, angle}};
  const auto r = find_relay(sys, k, l);
  if (!r) {
    throw CompileError("no coupling and no relay path for I" + std::to_string(k) + "z*I" + std::to_string(l) + "z");
  }
  return conjugated(relay_gates(k, *r), {GateZZ{*r, l, angle}});
}

inline GateList relayed_gates(const SpinSystem& sys, int k, int l, int relay, double angle) {
  check_pair(sys, k, l);
  if (relay == k || relay == l) return bilinear_gates(sys, k, l, angle);
  if (!sys.coupled(k, relay) || !sys.coupled(relay, l)) {
    throw CompileError("spin " + std::to_string(relay) + " is not a valid relay between " + std::to_string(k) +
                       " and " + std::to_string(l));
  }
  if (std::abs(angle) < kPruneTolerance) return {};
  return conjugated(relay_gates(k, relay), {GateZZ{relay, l, angle}});
}

inline GateList trilinear_gate_list(const SpinSystem& sys, std::array<int, 3> spins, double angle) {
  std::sort(spins.begin(), spins.end());
  if (spins[0] < 1 || spins[2] > sys.num_spins()) throw CompileError("spin index out of range");
  if (spins[0] == spins[1] || spins[1] == spins[2]) throw CompileError("trilinear term needs three distinct spins");
  // Pivot k must couple to both partners: W uses J_km, the inner term J_kl.
  for (int pivot = 0; pivot < 3; ++pivot) {
    const int k = spins[pivot];
    const int l = spins[pivot == 0 ? 1 : 0];
    const int m = spins[pivot == 2 ? 1 : 2];
    if (sys.coupled(k, l) && sys.coupled(k, m)) {
      if (std::abs(angle) < kPruneTolerance) return {};
      return conjugated(trilinear_gates(k, m), {GateZZ{k, l, angle}});
    }
  }
  throw CompileError("unsupported topology for I" + std::to_string(spins[0]) + "z*I" + std::to_string(spins[1]) +
                     "z*I" + std::to_string(spins[2]) + "z: no spin couples to both others");
}

}  // namespace detail

/// z rotation exp(-i angle I_kz), realized purely as a frame update.
inline PulseProgram compile_linear(int num_spins, int spin, double angle, const CompileOptions& opts = {}) {
  PulseProgram p(num_spins, opts.timing);
  if (spin < 1 || spin > num_spins) throw CompileError("spin index out of range");
  if (std::abs(angle) >= kPruneTolerance) p.rotate_frame(spin, angle);
  return p;
}

/// exp(-i angle 2 I_kz I_lz): a delay of |angle| / (pi J_kl), or a relay
/// construction when k and l are not coupled.
inline PulseProgram compile_bilinear(int k, int l, double angle, const SpinSystem& topology,
                                     const CompileOptions& opts = {}) {
  return detail::Lowering(topology, opts).lower(detail::bilinear_gates(topology, k, l, angle));
}

/// exp(-i angle 2 I_kz I_lz) as V exp(-i angle 2 I_rz I_lz) V^-1 through relay spin r.
inline PulseProgram compile_relayed_bilinear(int k, int l, int relay, double angle, const SpinSystem& topology,
                                             const CompileOptions& opts = {}) {
  return detail::Lowering(topology, opts).lower(detail::relayed_gates(topology, k, l, relay, angle));
}

/// exp(-i angle 4 I_kz I_lz I_mz) as W exp(-i angle 2 I_kz I_lz) W^-1.
inline PulseProgram compile_trilinear(int k, int l, int m, double angle, const SpinSystem& topology,
                                      const CompileOptions& opts = {}) {
  return detail::Lowering(topology, opts).lower(detail::trilinear_gate_list(topology, {k, l, m}, angle));
}

/// Angle for one Z-string term of H over time tau, in the normalization the
/// per-weight compilers take (I_kz, 2 I_kz I_lz, 4 I_kz I_lz I_mz).
inline double term_angle(const AxisString& axes, double coefficient, double tau) {
  int weight = 0;
  for (Axis a : axes) weight += a == Axis::Z;
  return coefficient * tau / std::ldexp(1.0, weight - 1);
}

struct CompileResult {
  PulseProgram raw{1};
  PulseProgram program{1};
  /// Streamlined program against exp(-i H tau).
  VerifyReport report;
  /// Raw program against exp(-i H tau).
  VerifyReport raw_report;
  double dropped_identity = 0.0;
  std::vector<GridRounding> rounding;
};

namespace detail {

inline void append_term(PulseProgram& out, Lowering& lowering, const AxisString& axes, Complex c, double tau,
                        const SpinSystem& topology, const CompileOptions& opts) {
  std::vector<int> zs;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i] == Axis::X || axes[i] == Axis::Y) throw CompileError("term " + axes_label(axes) + " is not a Z-string");
    if (axes[i] == Axis::Z) zs.push_back(static_cast<int>(i) + 1);
  }
  if (std::abs(c.imag()) > kPruneTolerance) throw CompileError("term " + axes_label(axes) + " has a complex coefficient");
  const double angle = term_angle(axes, c.real(), tau);
  switch (zs.size()) {
    case 0: return;
    case 1: out.then(compile_linear(topology.num_spins(), zs[0], angle, opts)); return;
    case 2: out.then(lowering.lower(bilinear_gates(topology, zs[0], zs[1], angle))); return;
    case 3: out.then(lowering.lower(trilinear_gate_list(topology, {zs[0], zs[1], zs[2]}, angle))); return;
    default:
      throw CompileError("term " + axes_label(axes) + " has weight " + std::to_string(zs.size()) +
                         "; at most three Z factors are supported");
  }
}

}  // namespace detail

/// Raw (unstreamlined) program for a single Z-string term of H over time tau.
inline PulseProgram compile_term(const AxisString& axes, double coefficient, double tau, const SpinSystem& topology,
                                 const CompileOptions& opts = {}) {
  PulseProgram p(topology.num_spins(), opts.timing);
  detail::Lowering lowering(topology, opts);
  detail::append_term(p, lowering, axes, coefficient, tau, topology, opts);
  return p;
}

/// Lowers a commuting Z-string Hamiltonian to a pulse program realizing
/// exp(-i H tau) up to a global phase. Terms are emitted in canonical order,
/// the result is streamlined and both programs are checked against the dense
/// propagator.
inline CompileResult compile_hamiltonian(const OperatorSum& h, const SpinSystem& topology, double tau,
                                         const CompileOptions& opts = {}) {
  if (h.num_spins() != topology.num_spins()) {
    throw CompileError("Hamiltonian has " + std::to_string(h.num_spins()) + " spins, topology has " +
                       std::to_string(topology.num_spins()));
  }
  if (!(tau > 0)) throw CompileError("tau must be positive");
  CompileResult res;
  res.raw = PulseProgram(topology.num_spins(), opts.timing);
  detail::Lowering lowering(topology, opts);
  // Reject unsupported terms before emitting anything.
  for (const auto& [axes, c] : h.terms()) {
    const auto weight = std::count(axes.begin(), axes.end(), Axis::Z);
    if (weight > 3) {
      throw CompileError("term " + axes_label(axes) + " has weight " + std::to_string(weight) +
                         "; at most three Z factors are supported");
    }
  }
  for (const auto& [axes, c] : h.terms()) {
    if (std::all_of(axes.begin(), axes.end(), [](Axis a) { return a == Axis::E; })) {
      res.dropped_identity = c.real();
      continue;
    }
    detail::append_term(res.raw, lowering, axes, c, tau, topology, opts);
  }
  res.rounding = lowering.rounding();
  res.program = streamline(res.raw);
  const DenseOperator target = exp_commuting_zsum(h, tau);
  res.raw_report = verify(res.raw, target);
  res.report = verify(res.program, target);
  return res;
}

}  // namespace thermodj
