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

#include "thermodj/pulse_compiler.hpp"
#include "thermodj/spin_algebra.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermodj {

// Spin-system files are sectioned text:
//
//   [spins]
//   1 offset_hz=0 nucleus=13C name=C1
//   [couplings]
//   1 2 65.2
//   [grid]
//   delta_us = 81.75
//   [pulses]
//   selective_90_us = 224
//
// '#' starts a comment. Keys must match exactly; anything unknown is an error.

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& what, int line)
      : std::invalid_argument("config line " + std::to_string(line) + ": " + what) {}
};

struct SpinSystemConfig {
  SpinSystem system;
  std::optional<double> delta_us;
  PulseTiming timing;

  /// Grid spacing in seconds: the configured value, else 1/|nu_1 - nu_2|.
  double grid_delta() const {
    if (delta_us) return *delta_us * 1e-6;
    if (system.num_spins() >= 2) {
      const double d = std::abs(system.offset_hz(1) - system.offset_hz(2));
      if (d > 0) return 1.0 / d;
    }
    throw std::invalid_argument("no grid spacing configured and spins 1 and 2 share an offset");
  }

  CompileOptions compile_options(bool grid) const {
    CompileOptions o;
    o.grid = grid;
    o.timing = timing;
    if (grid) o.grid_delta = grid_delta();
    return o;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline double parse_double(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + s + "'", line);
  }
}

inline int parse_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer '" + s + "'", line);
  }
}

}  // namespace detail

inline SpinSystemConfig parse_spin_system(std::istream& is) {
  struct SpinRow {
    double offset = 0;
    std::string nucleus, name;
  };
  std::vector<SpinRow> spins;
  std::vector<std::tuple<int, int, double, int>> couplings;
  SpinSystemConfig cfg;
  std::string section;
  std::set<std::string> seen_keys;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError("malformed section header", line);
      section = text.substr(1, text.size() - 2);
      if (section != "spins" && section != "couplings" && section != "grid" && section != "pulses") {
        throw ConfigError("unknown section '" + section + "'", line);
      }
      continue;
    }
    std::istringstream ls(text);
    if (section == "spins") {
      std::string idx;
      ls >> idx;
      if (detail::parse_int(idx, line) != static_cast<int>(spins.size()) + 1) {
        throw ConfigError("spins must be listed in order 1, 2, ...", line);
      }
      SpinRow row;
      bool has_offset = false;
      std::string tok;
      while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + tok + "'", line);
        const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
        if (key == "offset_hz") {
          row.offset = detail::parse_double(value, line);
          has_offset = true;
        } else if (key == "nucleus") {
          row.nucleus = value;
        } else if (key == "name") {
          row.name = value;
        } else {
          throw ConfigError("unknown spin key '" + key + "'", line);
        }
      }
      if (!has_offset) throw ConfigError("spin is missing offset_hz", line);
      spins.push_back(row);
    } else if (section == "couplings") {
      std::string a, b, j, extra;
      if (!(ls >> a >> b >> j) || (ls >> extra)) throw ConfigError("expected '<spin> <spin> <J_hz>'", line);
      couplings.emplace_back(detail::parse_int(a, line), detail::parse_int(b, line), detail::parse_double(j, line), line);
    } else if (section == "grid" || section == "pulses") {
      const auto eq = text.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key = value", line);
      const std::string key = detail::trim(text.substr(0, eq));
      const double v = detail::parse_double(detail::trim(text.substr(eq + 1)), line);
      if (!seen_keys.insert(section + "." + key).second) throw ConfigError("duplicate key '" + key + "'", line);
      if (v < 0) throw ConfigError("'" + key + "' must be non-negative", line);
      if (section == "grid" && key == "delta_us") cfg.delta_us = v;
      else if (section == "pulses" && key == "hard_90_us") cfg.timing.hard_90 = v * 1e-6;
      else if (section == "pulses" && key == "hard_180_us") cfg.timing.hard_180 = v * 1e-6;
      else if (section == "pulses" && key == "selective_90_us") cfg.timing.selective_90 = v * 1e-6;
      else if (section == "pulses" && key == "selective_180_us") cfg.timing.selective_180 = v * 1e-6;
      else throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
    } else {
      throw ConfigError("content outside any section", line);
    }
  }
  if (spins.empty()) throw ConfigError("no spins defined", line);
  const int m = static_cast<int>(spins.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
  for (const auto& [a, b, jv, l] : couplings) {
    if (a < 1 || a > m || b < 1 || b > m) throw ConfigError("coupling references an unknown spin", l);
    if (a == b) throw ConfigError("a spin cannot couple to itself", l);
    if (j(a - 1, b - 1) != 0.0) throw ConfigError("duplicate coupling", l);
    j(a - 1, b - 1) = j(b - 1, a - 1) = jv;
  }
  std::vector<std::string> labels, nuclei;
  std::vector<double> offsets;
  for (int k = 0; k < m; ++k) {
    labels.push_back(spins[k].name.empty() ? std::to_string(k + 1) : spins[k].name);
    nuclei.push_back(spins[k].nucleus);
    offsets.push_back(spins[k].offset);
  }
  cfg.system = SpinSystem(labels, offsets, j, nuclei);
  return cfg;
}

inline SpinSystemConfig parse_spin_system(const std::string& text) {
  std::istringstream is(text);
  return parse_spin_system(is);
}

inline SpinSystemConfig load_spin_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  return parse_spin_system(in);
}

}  // namespace thermodj
