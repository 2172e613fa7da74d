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

#include "thermodj/config.hpp"

#include <gtest/gtest.h>

namespace {

using namespace thermodj;

const std::string kDataDir = THERMODJ_DATA_DIR;

TEST(Config, GlycineFile) {
  const auto cfg = load_spin_system(kDataDir + "/glycine.cfg");
  const auto& s = cfg.system;
  ASSERT_EQ(s.num_spins(), 4);
  EXPECT_EQ(s.labels()[0], "C1");
  EXPECT_EQ(s.nucleus(4), "15N");
  EXPECT_EQ(s.offset_hz(2), -12231.0);
  EXPECT_EQ(s.coupling_hz(1, 3), 366.0);
  EXPECT_EQ(s.coupling_hz(4, 2), 13.5);
  EXPECT_FALSE(s.coupled(1, 4));
  EXPECT_FALSE(s.coupled(3, 4));
  EXPECT_DOUBLE_EQ(cfg.grid_delta(), 81.75e-6);
  EXPECT_DOUBLE_EQ(cfg.timing.selective_90, 224e-6);
  EXPECT_EQ(cfg.timing.hard_90, 0.0);
  const auto o = cfg.compile_options(true);
  EXPECT_TRUE(o.grid);
  EXPECT_DOUBLE_EQ(o.grid_delta, 81.75e-6);
}

TEST(Config, GridFallsBackToOffsetDifference) {
  const auto cfg = parse_spin_system("[spins]\n1 offset_hz=0\n2 offset_hz=-12231\n[couplings]\n1 2 65\n");
  EXPECT_DOUBLE_EQ(cfg.grid_delta(), 1.0 / 12231.0);
  EXPECT_NEAR(cfg.grid_delta() * 1e6, 81.76, 0.005);
  const auto flat = parse_spin_system("[spins]\n1 offset_hz=0\n2 offset_hz=0\n");
  EXPECT_THROW(flat.grid_delta(), std::invalid_argument);
  EXPECT_NO_THROW(flat.compile_options(false));
}

TEST(Config, CommentsAndBlankLines) {
  const auto cfg = parse_spin_system("# header\n\n[spins]  # trailing\n1 offset_hz=5 name=a\n2 offset_hz=7\n");
  EXPECT_EQ(cfg.system.labels()[0], "a");
  EXPECT_EQ(cfg.system.labels()[1], "2");
  EXPECT_FALSE(cfg.delta_us.has_value());
}

int error_line(const std::string& text) {
  try {
    parse_spin_system(text);
  } catch (const ConfigError& e) {
    const std::string w = e.what();
    return std::stoi(w.substr(std::string("config line ").size()));
  }
  return -1;
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("[spins]\n1 offset_hz=0\n[bogus]\n"), 3);
  EXPECT_EQ(error_line("[spins]\n2 offset_hz=0\n"), 2);
  EXPECT_EQ(error_line("[spins]\n1 nucleus=13C\n"), 2);
  EXPECT_EQ(error_line("[spins]\n1 offset_hz=abc\n"), 2);
  EXPECT_EQ(error_line("[spins]\n1 offset_hz=0 color=red\n"), 2);
  EXPECT_EQ(error_line("[spins]\n1 offset_hz=0\n2 offset_hz=0\n[couplings]\n1 1 5\n"), 5);
  EXPECT_EQ(error_line("[spins]\n1 offset_hz=0\n2 offset_hz=0\n[couplings]\n1 2 5\n2 1 6\n"), 6);
  EXPECT_EQ(error_line("[spins]\n1 offset_hz=0\n[couplings]\n1 3 5\n"), 4);
  EXPECT_EQ(error_line("[spins]\n1 offset_hz=0\n[couplings]\n1 2\n"), 4);
  EXPECT_EQ(error_line("[spins]\n1 offset_hz=0\n[grid]\ndelta_us = -1\n"), 4);
  EXPECT_EQ(error_line("[spins]\n1 offset_hz=0\n[grid]\ndelta_us = 1\ndelta_us = 2\n"), 5);
  EXPECT_EQ(error_line("[spins]\n1 offset_hz=0\n[pulses]\nsoft_us = 1\n"), 4);
  EXPECT_EQ(error_line("1 offset_hz=0\n"), 1);
  EXPECT_EQ(error_line("[spins\n"), 1);
  EXPECT_EQ(error_line("# nothing\n"), 1);
  EXPECT_THROW(load_spin_system(kDataDir + "/missing.cfg"), std::invalid_argument);
}

}  // namespace
