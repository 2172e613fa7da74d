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

#include "commands.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

void add_config(CLI::App* app, std::string& path) {
  app->add_option("--config", path, "spin-system file")->required()->check(CLI::ExistingFile);
}

void add_function(CLI::App* app, thermodj::cli::FunctionSpec& spec) {
  auto* expr = app->add_option_function<std::string>(
      "--function", [&spec](const std::string& v) { spec.expression = v; }, "Boolean expression in x2..x{n+1}");
  auto* table = app->add_option_function<std::string>(
      "--table", [&spec](const std::string& v) { spec.table = v; }, "truth table bits, f(0) first");
  expr->excludes(table);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace thermodj::cli;
  CLI::App app{"thermodj: Deutsch-Jozsa on thermal spin ensembles"};
  app.require_subcommand(1);

  DjArgs dj;
  auto* dj_cmd = app.add_subcommand("dj", "run the algorithm and decide constant or balanced");
  add_config(dj_cmd, dj.config);
  add_function(dj_cmd, dj.function);
  dj_cmd->add_option("--alpha1", dj.alpha1, "polarization of spin 1");
  dj_cmd->add_flag("--machine-output", dj.machine, "emit JSON");

  CompileArgs co;
  auto* co_cmd = app.add_subcommand("compile", "compile cU_f into a pulse program");
  add_config(co_cmd, co.config);
  add_function(co_cmd, co.function);
  co_cmd->add_option("--tau", co.tau, "evolution time in seconds")->check(CLI::PositiveNumber);
  co_cmd->add_flag("--grid", co.grid, "round delays to the grid spacing");
  co_cmd->add_option("--branch", co.branch, "logarithm branch")->check(CLI::IsMember({"anf", "principal"}));
  co_cmd->add_option("-o,--output", co.output, "write the program here");
  co_cmd->add_flag("--machine-output", co.machine, "emit JSON");

  SpectrumArgs sp;
  auto* sp_cmd = app.add_subcommand("spectrum", "predict the detected multiplet");
  add_config(sp_cmd, sp.config);
  add_function(sp_cmd, sp.function);
  sp_cmd->add_option("--state", sp.state, "product-operator literal, e.g. 2*I1x*I4z");
  sp_cmd->add_option("--detect", sp.detect, "detected spin (index or label)");
  sp_cmd->add_option("--linewidth", sp.linewidth_hz, "Lorentzian FWHM in Hz")->check(CLI::PositiveNumber);
  sp_cmd->add_option("--cnot", sp.cnot, "apply CNOT CONTROL,TARGET first");
  sp_cmd->add_flag("--readout-y90", sp.readout_y90, "apply a 90y pulse on the detected spin");
  sp_cmd->add_option("--plot", sp.plot, "write a frequency/amplitude table");
  sp_cmd->add_flag("--machine-output", sp.machine, "emit JSON");

  SweepArgs sw;
  auto* sw_cmd = app.add_subcommand("sweep", "run every truth table on n inputs");
  sw_cmd->add_option("-n,--sweep", sw.n, "number of inputs")->required()->check(CLI::Range(1, 4));
  sw_cmd->add_option("--alpha1", sw.alpha1, "polarization of spin 1");
  sw_cmd->add_option("--threads", sw.threads, "worker threads (0 = all cores)");
  sw_cmd->add_flag("--machine-output", sw.machine, "emit JSON");

  CLI11_PARSE(app, argc, argv);

  if (*dj_cmd) return cmd_dj(dj, std::cout, std::cerr);
  if (*co_cmd) return cmd_compile(co, std::cout, std::cerr);
  if (*sp_cmd) return cmd_spectrum(sp, std::cout, std::cerr);
  return cmd_sweep(sw, std::cout, std::cerr);
}
