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

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermodj {

struct SpectralLine {
  /// Frequency relative to the detected spin's resonance: sum_k J_dk m_k.
  double offset_hz = 0.0;
  /// Absorptive (I_dx) amplitude; a pure I_dx state gives 1 on every line.
  double intensity = 0.0;
  /// Dispersive (I_dy) amplitude, same normalization.
  double dispersive = 0.0;
  /// One character per partner, in partner order: '0' for m = +1/2, '1' for m = -1/2.
  std::string partner_state;
};

struct Multiplet {
  int detect_spin = 1;
  /// Spins with a non-zero coupling to the detected spin, ascending.
  std::vector<int> partners;
  /// Lines sorted by ascending offset.
  std::vector<SpectralLine> lines;

  double intensity_sum() const {
    double s = 0;
    for (const auto& l : lines) s += l.intensity;
    return s;
  }

  /// Colon-separated intensities, e.g. "-1:1:0:0".
  std::string ratio_string() const;
};

namespace detail {

inline std::string format_intensity(double v) {
  if (std::abs(v - std::round(v)) < 1e-9) {
    const long long r = std::llround(v);
    return std::to_string(r);
  }
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace detail

inline std::string Multiplet::ratio_string() const {
  std::string out;
  for (const auto& l : lines) out += (out.empty() ? "" : ":") + detail::format_intensity(l.intensity);
  return out;
}

/// Line positions and amplitudes of the detected spin's multiplet. A term
/// contributes when it carries X (or Y, dispersive) on the detected spin and
/// only E/Z elsewhere; a Z on a spin not coupled to the detected one cannot
/// evolve into observable signal and contributes nothing. The amplitude of
/// line s is sum_terms c * prod_{k in Z(term)} m_k(s).
inline Multiplet multiplet_of(const OperatorSum& rho, int detect, const SpinSystem& topology) {
  const int m = topology.num_spins();
  if (rho.num_spins() != m) throw std::invalid_argument("state and topology have different spin counts");
  if (detect < 1 || detect > m) throw std::invalid_argument("detect spin " + std::to_string(detect) + " out of range");

  Multiplet mp;
  mp.detect_spin = detect;
  for (int k = 1; k <= m; ++k)
    if (topology.coupled(detect, k)) mp.partners.push_back(k);
  const std::size_t p = mp.partners.size();
  const std::size_t n_lines = std::size_t{1} << p;

  mp.lines.resize(n_lines);
  for (std::size_t s = 0; s < n_lines; ++s) {
    auto& line = mp.lines[s];
    for (std::size_t i = 0; i < p; ++i) {
      const bool down = (s >> (p - 1 - i)) & 1;
      line.partner_state += down ? '1' : '0';
      line.offset_hz += topology.coupling_hz(detect, mp.partners[i]) * (down ? -0.5 : 0.5);
    }
  }

  for (const auto& [axes, c] : rho.terms()) {
    const Axis on_detect = axes[detect - 1];
    if (on_detect != Axis::X && on_detect != Axis::Y) continue;
    bool observable = true;
    std::vector<std::size_t> z_partners;
    for (int k = 1; k <= m && observable; ++k) {
      if (k == detect || axes[k - 1] == Axis::E) continue;
      if (axes[k - 1] != Axis::Z) {
        observable = false;
        break;
      }
      const auto it = std::find(mp.partners.begin(), mp.partners.end(), k);
      if (it == mp.partners.end()) observable = false;
      else z_partners.push_back(static_cast<std::size_t>(it - mp.partners.begin()));
    }
    if (!observable) continue;
    for (std::size_t s = 0; s < n_lines; ++s) {
      double v = c.real();
      for (auto i : z_partners) v *= ((s >> (p - 1 - i)) & 1) ? -0.5 : 0.5;
      (on_detect == Axis::X ? mp.lines[s].intensity : mp.lines[s].dispersive) += v;
    }
  }

  std::stable_sort(mp.lines.begin(), mp.lines.end(), [](const SpectralLine& a, const SpectralLine& b) {
    if (a.offset_hz != b.offset_hz) return a.offset_hz < b.offset_hz;
    return a.partner_state < b.partner_state;
  });
  return mp;
}

/// <I_dx> = Tr(I_dx rho) for a state given in product-operator form.
inline double integrated_signal(const OperatorSum& rho, int detect) {
  const int m = rho.num_spins();
  const Complex c = rho.coefficient(OperatorSum::single_axes(m, detect, Axis::X));
  // Tr(I_dx I_dx) = N / 4.
  return c.real() * std::ldexp(1.0, m) / 4;
}

/// Controlled-NOT with the given control and target spins over m spins.
inline DenseOperator cnot(int m, int control, int target) {
  detail::check_spin_count(m);
  if (control == target) throw std::invalid_argument("cnot: control and target must differ");
  if (control < 1 || control > m || target < 1 || target > m) throw std::invalid_argument("cnot: spin out of range");
  const auto cb = detail::spin_bit(m, control), tb = detail::spin_bit(m, target);
  const std::uint32_t dim = std::uint32_t{1} << m;
  Matrix u = Matrix::Zero(dim, dim);
  for (std::uint32_t k = 0; k < dim; ++k) u((k & cb) ? (k ^ tb) : k, k) = 1.0;
  return {m, std::move(u)};
}

struct SpectrumSample {
  double hz = 0.0;
  double amplitude = 0.0;
};

/// Sum of Lorentzians (full width at half maximum `linewidth_hz`, peak height
/// equal to the line intensity) sampled on a uniform grid spanning the
/// multiplet plus ten linewidths either side.
inline std::vector<SpectrumSample> render_spectrum(const Multiplet& mp, double linewidth_hz, std::size_t samples = 4001) {
  if (!(linewidth_hz > 0)) throw std::invalid_argument("linewidth must be positive");
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  double lo = 0, hi = 0;
  for (const auto& l : mp.lines) {
    lo = std::min(lo, l.offset_hz);
    hi = std::max(hi, l.offset_hz);
  }
  const double span = std::max(std::abs(lo), std::abs(hi)) + 10 * linewidth_hz;
  const double half = linewidth_hz / 2;
  std::vector<SpectrumSample> out(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double f = -span + 2 * span * static_cast<double>(i) / static_cast<double>(samples - 1);
    double a = 0;
    for (const auto& l : mp.lines) a += l.intensity * half * half / ((f - l.offset_hz) * (f - l.offset_hz) + half * half);
    out[i] = {f, a};
  }
  return out;
}

inline void write_plot_table(std::ostream& os, const std::vector<SpectrumSample>& samples) {
  os << "# frequency_hz\tamplitude\n";
  os.precision(10);
  for (const auto& s : samples) os << s.hz << '\t' << (std::abs(s.amplitude) < 1e-15 ? 0.0 : s.amplitude) << '\n';
}

}  // namespace thermodj
