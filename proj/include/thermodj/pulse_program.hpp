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

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace thermodj {

enum class RotationAxis { X, Y, Z };
enum class PulseKind { Hard, Selective };

/// Nominal pulse lengths in seconds. Rotations up to 90 degrees take the
/// 90-degree length, larger ones the 180-degree length.
struct PulseTiming {
  double hard_90 = 0.0;
  double hard_180 = 0.0;
  double selective_90 = 224e-6;
  double selective_180 = 250e-6;

  double duration(PulseKind kind, double angle) const {
    const bool small = std::abs(angle) <= std::numbers::pi / 2 + 1e-9;
    if (kind == PulseKind::Selective) return small ? selective_90 : selective_180;
    return small ? hard_90 : hard_180;
  }
};

/// exp(-i angle (cos p I_x + sin p I_y)) with p = base(axis) + phase for the
/// transverse axes; a Z rotation is frame bookkeeping with zero duration.
struct Rotation {
  int spin = 1;
  RotationAxis axis = RotationAxis::X;
  double angle = 0.0;
  double phase = 0.0;
  PulseKind kind = PulseKind::Hard;
  double duration = 0.0;
  /// Off-resonance compensation frequency (Hz) for selective pulses; annotation only.
  std::optional<double> compensate_hz;

  double effective_phase() const { return phase + (axis == RotationAxis::Y ? std::numbers::pi / 2 : 0.0); }
};

struct ActiveCoupling {
  int k = 1;
  int l = 2;
  double j_hz = 0.0;
};

/// Free evolution under the listed couplings; every other interaction is
/// ideally decoupled.
struct Delay {
  double duration = 0.0;
  std::vector<ActiveCoupling> active_couplings;
  std::vector<int> decoupled_spins;

  bool touches(int spin) const {
    for (const auto& c : active_couplings)
      if (c.k == spin || c.l == spin) return true;
    return false;
  }
};

struct Barrier {
  std::string annotation;
};

using PulseEvent = std::variant<Rotation, Delay, Barrier>;

namespace detail {

inline double wrap_angle(double a) {
  double r = std::remainder(a, 2 * std::numbers::pi);
  if (r <= -std::numbers::pi + 1e-15) r += 2 * std::numbers::pi;
  return r;
}

inline bool same_angle(double a, double b, double tol = 1e-12) { return std::abs(wrap_angle(a - b)) < tol; }

}  // namespace detail

/// Ordered events plus a per-spin z frame. The propagator is
/// prod_k exp(-i frame_k I_kz) * U_last * ... * U_first.
class PulseProgram {
 public:
  explicit PulseProgram(int num_spins, PulseTiming timing = {})
      : num_spins_(num_spins), phase_frame_(num_spins, 0.0), timing_(timing) {
    if (num_spins < 1) throw std::invalid_argument("pulse program needs at least one spin");
  }

  int num_spins() const { return num_spins_; }
  const std::vector<PulseEvent>& events() const { return events_; }
  std::vector<PulseEvent>& events() { return events_; }
  const std::vector<double>& phase_frame() const { return phase_frame_; }
  double frame(int spin) const { return phase_frame_.at(spin - 1); }
  const PulseTiming& timing() const { return timing_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty() && std::all_of(phase_frame_.begin(), phase_frame_.end(), [](double f) { return f == 0.0; }); }

  void push(PulseEvent e) { events_.push_back(std::move(e)); }

  /// Adds a z rotation by `angle` to the frame of `spin`.
  void rotate_frame(int spin, double angle) { phase_frame_.at(spin - 1) += angle; }

  double total_duration() const {
    double t = 0;
    for (const auto& e : events_) {
      if (const auto* r = std::get_if<Rotation>(&e)) t += r->duration;
      else if (const auto* d = std::get_if<Delay>(&e)) t += d->duration;
    }
    return t;
  }

  std::size_t rotation_count() const {
    std::size_t n = 0;
    for (const auto& e : events_) n += std::holds_alternative<Rotation>(e);
    return n;
  }

  /// Sequential composition: `next` runs after this program. The pending
  /// frame of this program shifts the phase of every transverse pulse in
  /// `next` by -frame.
  PulseProgram& then(const PulseProgram& next) {
    if (next.num_spins_ != num_spins_) throw std::invalid_argument("spin count mismatch in concatenation");
    for (PulseEvent e : next.events_) {
      if (auto* r = std::get_if<Rotation>(&e); r && r->axis != RotationAxis::Z) r->phase -= phase_frame_[r->spin - 1];
      events_.push_back(std::move(e));
    }
    for (int k = 0; k < num_spins_; ++k) phase_frame_[k] += next.phase_frame_[k];
    return *this;
  }

 private:
  int num_spins_;
  std::vector<PulseEvent> events_;
  std::vector<double> phase_frame_;
  PulseTiming timing_;
};

/// Dense propagator of a program with every event taken as its ideal unitary.
inline DenseOperator simulate(const PulseProgram& p) {
  const int m = p.num_spins();
  Matrix u = DenseOperator::identity(m).matrix();
  const std::uint32_t dim = std::uint32_t{1} << m;
  for (const auto& e : p.events()) {
    if (const auto* r = std::get_if<Rotation>(&e)) {
      const auto g = r->axis == RotationAxis::Z ? z_rotation_2x2(r->angle)
                                                : transverse_rotation_2x2(r->angle, r->effective_phase());
      apply_single_spin(u, m, r->spin, g);
    } else if (const auto* d = std::get_if<Delay>(&e)) {
      for (const auto& c : d->active_couplings) {
        // exp(-i pi J t 2 I_kz I_lz); 2 I_kz I_lz = +-1/2 on basis states.
        const double angle = std::numbers::pi * c.j_hz * d->duration;
        const auto bk = detail::spin_bit(m, c.k), bl = detail::spin_bit(m, c.l);
        const Complex same = std::polar(1.0, -angle / 2), diff = std::polar(1.0, angle / 2);
        for (std::uint32_t row = 0; row < dim; ++row) {
          const bool equal = ((row & bk) != 0) == ((row & bl) != 0);
          u.row(row) *= equal ? same : diff;
        }
      }
    }
  }
  for (int k = 1; k <= m; ++k)
    if (p.frame(k) != 0.0) apply_single_spin(u, m, k, z_rotation_2x2(p.frame(k)));
  return {m, std::move(u)};
}

/// Tolerance on the phase-aligned Frobenius distance for a passing program.
inline constexpr double kVerifyTolerance = 1e-9;

struct VerifyReport {
  double distance = 0.0;
  /// e^{i phi} with U_program ~= e^{i phi} U_target.
  Complex global_phase{1.0, 0.0};
  bool passed = false;
};

/// min over phi of || U - e^{i phi} T ||_F.
inline VerifyReport phase_aligned_distance(const DenseOperator& u, const DenseOperator& target) {
  if (u.num_spins() != target.num_spins()) throw std::invalid_argument("dimension mismatch in verification");
  const Complex overlap = (target.matrix().adjoint() * u.matrix()).trace();
  const Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
  VerifyReport r;
  r.global_phase = phase;
  r.distance = (u.matrix() - phase * target.matrix()).norm();
  r.passed = r.distance < kVerifyTolerance;
  return r;
}

inline VerifyReport verify(const PulseProgram& p, const DenseOperator& target) {
  if (!target.is_unitary()) throw std::invalid_argument("verification target is not unitary");
  return phase_aligned_distance(simulate(p), target);
}

namespace detail {

inline bool touches(const PulseEvent& e, int spin) {
  if (const auto* r = std::get_if<Rotation>(&e)) return r->spin == spin;
  if (const auto* d = std::get_if<Delay>(&e)) return d->touches(spin);
  return true;  // barriers fence every spin
}

inline bool is_transverse(const PulseEvent& e) {
  const auto* r = std::get_if<Rotation>(&e);
  return r && r->axis != RotationAxis::Z;
}

// Moves every z rotation into the frame, re-phasing later pulses on its spin.
inline bool fold_z_rotations(PulseProgram& p) {
  auto& ev = p.events();
  bool changed = false;
  for (std::size_t i = 0; i < ev.size();) {
    const auto* r = std::get_if<Rotation>(&ev[i]);
    if (!r || r->axis != RotationAxis::Z) {
      ++i;
      continue;
    }
    const int spin = r->spin;
    const double angle = r->angle;
    ev.erase(ev.begin() + static_cast<std::ptrdiff_t>(i));
    for (std::size_t j = i; j < ev.size(); ++j) {
      if (auto* later = std::get_if<Rotation>(&ev[j]); later && later->spin == spin && later->axis != RotationAxis::Z)
        later->phase -= angle;
    }
    p.rotate_frame(spin, angle);
    changed = true;
  }
  return changed;
}

// Merges each transverse pulse with the next event on the same spin when that
// event is a pulse about the same or the opposite axis.
inline bool merge_rotations(PulseProgram& p) {
  auto& ev = p.events();
  bool changed = false;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (!is_transverse(ev[i])) continue;
    auto& a = std::get<Rotation>(ev[i]);
    std::size_t j = i + 1;
    while (j < ev.size() && !touches(ev[j], a.spin)) ++j;
    if (j >= ev.size() || !is_transverse(ev[j])) continue;
    const auto& b = std::get<Rotation>(ev[j]);
    double sign = 0;
    if (same_angle(a.effective_phase(), b.effective_phase())) sign = 1;
    else if (same_angle(a.effective_phase(), b.effective_phase() + std::numbers::pi)) sign = -1;
    if (sign == 0) continue;
    a.angle = wrap_angle(a.angle + sign * b.angle);
    if (b.kind == PulseKind::Selective) a.kind = PulseKind::Selective;
    a.duration = p.timing().duration(a.kind, a.angle);
    ev.erase(ev.begin() + static_cast<std::ptrdiff_t>(j));
    changed = true;
    --i;  // retry the merged pulse against its new neighbour
  }
  return changed;
}

inline bool drop_trivial(PulseProgram& p) {
  auto& ev = p.events();
  const auto before = ev.size();
  std::erase_if(ev, [](const PulseEvent& e) {
    if (const auto* r = std::get_if<Rotation>(&e)) return std::abs(wrap_angle(r->angle)) < 1e-12;
    if (const auto* d = std::get_if<Delay>(&e)) return d->duration < 1e-15;
    return false;
  });
  return ev.size() != before;
}

}  // namespace detail

/// Peephole passes run to a fixed point: z rotations fold into the frame,
/// neighbouring pulses on one spin about a common axis merge (two pi pulses
/// of the same phase cancel), and zero rotations and zero delays are dropped.
/// The propagator is preserved up to a global phase.
inline PulseProgram streamline(PulseProgram p) {
  bool changed = true;
  while (changed) {
    changed = detail::fold_z_rotations(p);
    changed |= detail::drop_trivial(p);
    changed |= detail::merge_rotations(p);
  }
  return p;
}

// Text form: one event per line, tab-separated
//   kind  spins  axis  angle_deg  duration_us  flags
// with flags a ';'-separated list ("-" when empty).

namespace detail {

inline std::string fmt_num(double v) {
  if (std::abs(v) < 1e-13) v = 0.0;
  std::ostringstream os;
  os << std::setprecision(15) << v;
  return os.str();
}

inline double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }
inline double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline void write_program(std::ostream& os, const PulseProgram& p) {
  using detail::fmt_num;
  os << "# kind\tspins\taxis\tangle_deg\tduration_us\tflags\n";
  os << "SPINS\t" << p.num_spins() << "\t-\t0\t0\t-\n";
  for (const auto& e : p.events()) {
    if (const auto* r = std::get_if<Rotation>(&e)) {
      const char axis = r->axis == RotationAxis::X ? 'x' : r->axis == RotationAxis::Y ? 'y' : 'z';
      std::vector<std::string> flags;
      flags.emplace_back(r->kind == PulseKind::Selective ? "selective" : "hard");
      if (!detail::same_angle(r->phase, 0.0)) flags.push_back("phase_deg=" + fmt_num(detail::rad_to_deg(detail::wrap_angle(r->phase))));
      if (r->compensate_hz) flags.push_back("compensate_hz=" + fmt_num(*r->compensate_hz));
      std::string f;
      for (const auto& s : flags) f += (f.empty() ? "" : ";") + s;
      os << "ROT\t" << r->spin << '\t' << axis << '\t' << fmt_num(detail::rad_to_deg(r->angle)) << '\t'
         << fmt_num(r->duration * 1e6) << '\t' << f << '\n';
    } else if (const auto* d = std::get_if<Delay>(&e)) {
      std::string spins, jvals, dec;
      for (const auto& c : d->active_couplings) {
        spins += (spins.empty() ? "" : ",") + std::to_string(c.k) + "-" + std::to_string(c.l);
        jvals += (jvals.empty() ? "" : ",") + fmt_num(c.j_hz);
      }
      for (int s : d->decoupled_spins) dec += (dec.empty() ? "" : ",") + std::to_string(s);
      std::string f;
      if (!jvals.empty()) f += "j_hz=" + jvals;
      if (!dec.empty()) f += (f.empty() ? "" : ";") + std::string("decouple=") + dec;
      os << "DELAY\t" << (spins.empty() ? "-" : spins) << "\t-\t0\t" << fmt_num(d->duration * 1e6) << '\t'
         << (f.empty() ? "-" : f) << '\n';
    } else if (const auto* b = std::get_if<Barrier>(&e)) {
      os << "BARRIER\t-\t-\t0\t0\t" << (b->annotation.empty() ? "-" : b->annotation) << '\n';
    }
  }
  for (int k = 1; k <= p.num_spins(); ++k) {
    if (p.frame(k) != 0.0) os << "FRAME\t" << k << "\tz\t" << fmt_num(detail::rad_to_deg(p.frame(k))) << "\t0\t-\n";
  }
}

inline PulseProgram read_program(std::istream& is, PulseTiming timing = {}) {
  std::string line;
  std::optional<PulseProgram> p;
  int lineno = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("pulse program line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto f = detail::split(line, '\t');
    if (f.size() != 6) fail("expected 6 tab-separated fields");
    const std::string& kind = f[0];
    try {
      if (kind == "SPINS") {
        if (p) fail("duplicate SPINS line");
        p.emplace(std::stoi(f[1]), timing);
        continue;
      }
      if (!p) fail("missing SPINS line");
      std::vector<std::string> flags;
      if (f[5] != "-") flags = detail::split(f[5], ';');
      if (kind == "ROT") {
        Rotation r;
        r.spin = std::stoi(f[1]);
        if (r.spin < 1 || r.spin > p->num_spins()) fail("spin out of range");
        if (f[2] == "x") r.axis = RotationAxis::X;
        else if (f[2] == "y") r.axis = RotationAxis::Y;
        else if (f[2] == "z") r.axis = RotationAxis::Z;
        else fail("bad axis '" + f[2] + "'");
        r.angle = detail::deg_to_rad(std::stod(f[3]));
        r.duration = std::stod(f[4]) * 1e-6;
        for (const auto& fl : flags) {
          if (fl == "selective") r.kind = PulseKind::Selective;
          else if (fl == "hard") r.kind = PulseKind::Hard;
          else if (fl.rfind("phase_deg=", 0) == 0) r.phase = detail::deg_to_rad(std::stod(fl.substr(10)));
          else if (fl.rfind("compensate_hz=", 0) == 0) r.compensate_hz = std::stod(fl.substr(14));
          else fail("unknown flag '" + fl + "'");
        }
        p->push(r);
      } else if (kind == "DELAY") {
        Delay d;
        d.duration = std::stod(f[4]) * 1e-6;
        std::vector<std::string> pairs, jv;
        if (f[1] != "-") pairs = detail::split(f[1], ',');
        for (const auto& fl : flags) {
          if (fl.rfind("j_hz=", 0) == 0) jv = detail::split(fl.substr(5), ',');
          else if (fl.rfind("decouple=", 0) == 0)
            for (const auto& s : detail::split(fl.substr(9), ',')) d.decoupled_spins.push_back(std::stoi(s));
          else fail("unknown flag '" + fl + "'");
        }
        if (pairs.size() != jv.size()) fail("coupling list and j_hz list differ in length");
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          const auto kl = detail::split(pairs[i], '-');
          if (kl.size() != 2) fail("bad coupling '" + pairs[i] + "'");
          d.active_couplings.push_back({std::stoi(kl[0]), std::stoi(kl[1]), std::stod(jv[i])});
        }
        p->push(d);
      } else if (kind == "BARRIER") {
        p->push(Barrier{f[5] == "-" ? "" : f[5]});
      } else if (kind == "FRAME") {
        p->rotate_frame(std::stoi(f[1]), detail::deg_to_rad(std::stod(f[3])));
      } else {
        fail("unknown event kind '" + kind + "'");
      }
    } catch (const std::invalid_argument& e) {
      if (std::string(e.what()).rfind("pulse program line", 0) == 0) throw;
      fail(std::string("bad number: ") + e.what());
    } catch (const std::out_of_range&) {
      fail("value out of range");
    }
  }
  if (!p) throw std::invalid_argument("pulse program: missing SPINS line");
  return *p;
}

}  // namespace thermodj
