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

#include "thermodj/thermodj.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace thermodj::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitIndeterminate = 2;
inline constexpr int kExitVerifyFailed = 3;

/// Duration of the published streamlined sequence, shown next to ours.
inline constexpr double kReferenceDurationMs = 84.0;

struct FunctionSpec {
  std::optional<std::string> expression;
  std::optional<std::string> table;
};

struct DjArgs {
  std::string config;
  FunctionSpec function;
  double alpha1 = 1.0;
  bool machine = false;
};

struct CompileArgs {
  std::string config;
  FunctionSpec function;
  double tau = 1.0;
  bool grid = false;
  std::string branch = "anf";
  std::string output;
  bool machine = false;
};

struct SpectrumArgs {
  std::string config;
  FunctionSpec function;
  std::string state;
  std::string detect = "1";
  double linewidth_hz = 2.0;
  std::string cnot;
  bool readout_y90 = false;
  std::string plot;
  bool machine = false;
};

struct SweepArgs {
  int n = 3;
  double alpha1 = 1.0;
  unsigned threads = 0;
  bool machine = false;
};

namespace detail {

inline double clean(double v) { return std::abs(v) < 1e-15 ? 0.0 : v; }

inline std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << clean(v);
  return os.str();
}

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline BooleanOracle resolve_function(const FunctionSpec& spec, int n) {
  if (spec.expression && spec.table) throw std::invalid_argument("give either --function or --table, not both");
  if (spec.expression) return parse_function(*spec.expression, n);
  if (spec.table) {
    BooleanOracle f = BooleanOracle::from_bits(*spec.table);
    if (f.num_inputs() != n) {
      throw std::invalid_argument("truth table has " + std::to_string(f.size()) + " entries; the spin system needs " +
                                  std::to_string(std::size_t{1} << n));
    }
    return f;
  }
  throw std::invalid_argument("a function is required (--function or --table)");
}

inline std::string describe(const FunctionSpec& spec) {
  if (spec.expression) return *spec.expression;
  return spec.table ? *spec.table : "";
}

inline nlohmann::ordered_json terms_json(const OperatorSum& s) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [axes, c] : s.terms()) {
    nlohmann::ordered_json t;
    t["term"] = axes_label(axes);
    t["coefficient"] = clean(c.real());
    if (std::abs(c.imag()) > kPruneTolerance) t["imag"] = c.imag();
    arr.push_back(t);
  }
  return arr;
}

inline void print_terms(std::ostream& out, const OperatorSum& s, const std::string& indent) {
  if (s.empty()) {
    out << indent << "0\n";
    return;
  }
  for (const auto& [axes, c] : s.terms()) {
    const std::string label = std::all_of(axes.begin(), axes.end(), [](Axis a) { return a == Axis::E; })
                                  ? std::string("1")
                                  : axes_label(axes);
    out << indent << std::setw(16) << std::right << thermodj::detail::format_real(c.real()) << "  " << label << '\n';
  }
}

inline void report_error(std::ostream& err, const std::exception& e) {
  err << "error: " << e.what() << '\n';
}

}  // namespace detail

/// Runs the two-step algorithm for one function and prints <I_1x>, the
/// decision and the product-operator form of rho_2.
inline int cmd_dj(const DjArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = load_spin_system(args.config);
    const int m = cfg.system.num_spins();
    if (m < 2) throw std::invalid_argument("the spin system needs at least two spins");
    const BooleanOracle f = detail::resolve_function(args.function, m - 1);
    ThermalParams p;
    p.alphas = {args.alpha1};
    const DjOutcome o = run_dj(cfg.system, f, p);
    const OperatorSum shape = rho2_product_operators(f);

    if (args.machine) {
      nlohmann::ordered_json j;
      j["function"] = detail::describe(args.function);
      j["truth_table"] = f.to_bits();
      j["class"] = to_string(classify(f));
      j["alpha1"] = args.alpha1;
      j["expectation"] = detail::clean(o.expectation);
      j["closed_form"] = detail::clean(dj_closed_form(f, args.alpha1));
      j["decision"] = to_string(o.decision);
      j["rho2_shape"] = detail::terms_json(shape);
      out << j.dump(2) << '\n';
    } else {
      out << "function      " << detail::describe(args.function) << '\n'
          << "truth table   " << f.to_bits() << '\n'
          << "class         " << to_string(classify(f)) << '\n'
          << "alpha1        " << thermodj::detail::format_real(args.alpha1) << '\n'
          << "<I1x>         " << thermodj::detail::format_real(detail::clean(o.expectation)) << '\n'
          << "decision      " << to_string(o.decision) << '\n'
          << "rho2 = (1 + alpha1 * X) / N with X =\n";
      detail::print_terms(out, shape, "  ");
    }
    return o.decision == DjDecision::Indeterminate ? kExitIndeterminate : kExitOk;
  } catch (const std::exception& e) {
    detail::report_error(err, e);
    return kExitError;
  }
}

/// Synthesizes cU_f as a pulse program on the configured topology.
inline int cmd_compile(const CompileArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = load_spin_system(args.config);
    const int m = cfg.system.num_spins();
    if (m < 2) throw std::invalid_argument("the spin system needs at least two spins");
    const BooleanOracle f = detail::resolve_function(args.function, m - 1);
    const DenseOperator cu = controlled_oracle(f);

    std::vector<int> shift;
    if (args.branch == "anf") shift = algebraic_normal_form_shift(cu);
    else if (args.branch != "principal") throw std::invalid_argument("--branch must be 'anf' or 'principal'");
    const OperatorSum h = decompose_diagonal(effective_hamiltonian(cu, args.tau, shift), m);

    const CompileResult r = compile_hamiltonian(h, cfg.system, args.tau, cfg.compile_options(args.grid));
    const VerifyReport against_cu = verify(r.program, cu);
    const bool passed = against_cu.passed && r.raw_report.passed;
    const double duration_ms = r.program.total_duration() * 1e3;

    std::string program_text;
    {
      std::ostringstream ps;
      write_program(ps, r.program);
      program_text = ps.str();
    }
    if (!args.output.empty()) {
      std::ofstream file(args.output);
      if (!file) throw std::runtime_error("cannot write '" + args.output + "'");
      file << program_text;
    }

    if (args.machine) {
      nlohmann::ordered_json j;
      j["function"] = detail::describe(args.function);
      j["truth_table"] = f.to_bits();
      j["branch"] = args.branch;
      j["tau_s"] = args.tau;
      j["grid"] = args.grid;
      j["hamiltonian"] = detail::terms_json(h.traceless_part());
      j["identity_coefficient"] = detail::clean(r.dropped_identity);
      j["raw_events"] = r.raw.size();
      j["events"] = r.program.size();
      j["rotations"] = r.program.rotation_count();
      j["duration_ms"] = duration_ms;
      j["reference_duration_ms"] = kReferenceDurationMs;
      j["distance"] = against_cu.distance;
      j["tolerance"] = kVerifyTolerance;
      j["verified"] = passed;
      auto rounding = nlohmann::ordered_json::array();
      for (const auto& g : r.rounding)
        rounding.push_back({{"k", g.k}, {"l", g.l}, {"requested_us", g.requested * 1e6}, {"emitted_us", g.emitted * 1e6}});
      j["grid_rounding"] = rounding;
      if (args.output.empty()) j["program"] = program_text;
      else j["output"] = args.output;
      out << j.dump(2) << '\n';
    } else {
      out << "function      " << detail::describe(args.function) << " (" << f.to_bits() << ")\n"
          << "branch        " << args.branch << '\n'
          << "H_eff (rad/s, identity dropped: " << thermodj::detail::format_real(detail::clean(r.dropped_identity)) << ")\n";
      detail::print_terms(out, h.traceless_part(), "  ");
      if (r.program.empty()) out << "program       empty (cU is the identity)\n";
      out << "events        " << r.raw.size() << " raw, " << r.program.size() << " streamlined ("
          << r.program.rotation_count() << " rotations)\n"
          << "duration      " << detail::fixed(duration_ms, 3) << " ms (reference sequence: "
          << detail::fixed(kReferenceDurationMs, 0) << " ms)\n";
      if (args.grid) {
        out << "grid          delta = " << detail::fixed(cfg.grid_delta() * 1e6, 2) << " us, " << r.rounding.size()
            << " delays rounded\n";
        for (const auto& g : r.rounding)
          out << "  J" << g.k << g.l << "  " << detail::fixed(g.requested * 1e6, 2) << " us -> "
              << detail::fixed(g.emitted * 1e6, 2) << " us\n";
      }
      out << "distance      " << detail::sci(against_cu.distance) << " (tolerance " << detail::sci(kVerifyTolerance)
          << ") " << (passed ? "PASS" : (args.grid ? "rounding error" : "FAIL")) << '\n';
      if (args.output.empty()) out << '\n' << program_text;
      else out << "written       " << args.output << '\n';
    }
    if (!passed && !args.grid) return kExitVerifyFailed;
    return kExitOk;
  } catch (const std::exception& e) {
    detail::report_error(err, e);
    return kExitError;
  }
}

/// Predicts the detected spin's multiplet for a state, given either as a
/// function (the state after the oracle) or as a product-operator literal.
inline int cmd_spectrum(const SpectrumArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = load_spin_system(args.config);
    const int m = cfg.system.num_spins();
    const int detect = cfg.system.index_of(args.detect);

    OperatorSum rho(m);
    std::string source;
    if (!args.state.empty()) {
      if (args.function.expression || args.function.table) throw std::invalid_argument("give either a state or a function");
      rho = parse_operator_sum(args.state, m);
      source = args.state;
    } else {
      const BooleanOracle f = detail::resolve_function(args.function, m - 1);
      rho = rho2_product_operators(f);
      source = detail::describe(args.function);
    }
    if (!args.cnot.empty()) {
      const auto comma = args.cnot.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("--cnot expects CONTROL,TARGET");
      const int c = cfg.system.index_of(args.cnot.substr(0, comma));
      const int t = cfg.system.index_of(args.cnot.substr(comma + 1));
      rho = conjugate_terms(cnot(m, c, t), rho);
    }
    if (args.readout_y90) rho = conjugate_terms(readout_pulse(m, detect), rho);

    const Multiplet mp = multiplet_of(rho, detect, cfg.system);
    const double integral = integrated_signal(rho, detect);

    if (!args.plot.empty()) {
      std::ofstream file(args.plot);
      if (!file) throw std::runtime_error("cannot write '" + args.plot + "'");
      write_plot_table(file, render_spectrum(mp, args.linewidth_hz));
    }

    if (args.machine) {
      nlohmann::ordered_json j;
      j["source"] = source;
      j["detect"] = detect;
      j["state"] = detail::terms_json(rho);
      j["ratio"] = mp.ratio_string();
      auto lines = nlohmann::ordered_json::array();
      for (const auto& l : mp.lines)
        lines.push_back({{"offset_hz", detail::clean(l.offset_hz)},
                         {"intensity", detail::clean(l.intensity)},
                         {"dispersive", detail::clean(l.dispersive)},
                         {"partners", l.partner_state}});
      j["lines"] = lines;
      j["integrated_signal"] = detail::clean(integral);
      if (!args.plot.empty()) j["plot"] = args.plot;
      out << j.dump(2) << '\n';
    } else {
      out << "state         " << source << '\n';
      if (!args.cnot.empty()) out << "cnot          " << args.cnot << '\n';
      if (args.readout_y90) out << "readout       90y on spin " << detect << '\n';
      out << "observed\n";
      detail::print_terms(out, rho, "  ");
      out << "detect        spin " << detect << " (partners:";
      for (int p : mp.partners) out << ' ' << p;
      out << ")\n"
          << "ratio         " << mp.ratio_string() << '\n'
          << "  offset_hz   absorptive  dispersive\n";
      for (const auto& l : mp.lines)
        out << "  " << std::setw(9) << detail::fixed(l.offset_hz, 2) << "   " << std::setw(10)
            << detail::fixed(l.intensity, 4) << "  " << std::setw(10) << detail::fixed(l.dispersive, 4) << '\n';
      out << "<I" << detect << "x>         " << thermodj::detail::format_real(detail::clean(integral)) << '\n';
      if (!args.plot.empty()) out << "plot          " << args.plot << '\n';
    }
    return kExitOk;
  } catch (const std::exception& e) {
    detail::report_error(err, e);
    return kExitError;
  }
}

struct SweepSummary {
  int n = 0;
  std::size_t tables = 0;
  std::size_t constant = 0;
  std::size_t balanced = 0;
  std::size_t neither = 0;
  /// Promise-class functions whose decision matched their class.
  std::size_t correct = 0;
  double max_deviation = 0.0;
};

/// Runs every truth table on n inputs through the algorithm.
inline SweepSummary sweep(int n, double alpha1, unsigned threads = 0) {
  if (n < 1 || n > 4) throw std::invalid_argument("sweep needs 1 <= n <= 4");
  const std::size_t count = std::size_t{1} << (std::size_t{1} << n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));

  const SpinSystem sys = SpinSystem::uncoupled(n + 1);
  ThermalParams p;
  p.alphas = {alpha1};
  std::vector<SweepSummary> partial(threads);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](unsigned t) {
    try {
      auto& s = partial[t];
      for (std::size_t idx; (idx = next.fetch_add(1)) < count;) {
        const BooleanOracle f = BooleanOracle::from_index(n, idx);
        const FunctionClass cls = classify(f);
        const DjOutcome o = run_dj(sys, f, p);
        s.max_deviation = std::max(s.max_deviation, std::abs(o.expectation - dj_closed_form(f, alpha1)));
        ++s.tables;
        switch (cls) {
          case FunctionClass::Constant0:
            ++s.constant;
            s.correct += o.decision == DjDecision::Constant0;
            break;
          case FunctionClass::Constant1:
            ++s.constant;
            s.correct += o.decision == DjDecision::Constant1;
            break;
          case FunctionClass::Balanced:
            ++s.balanced;
            s.correct += o.decision == DjDecision::Balanced;
            break;
          case FunctionClass::Neither: ++s.neither; break;
        }
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SweepSummary total;
  total.n = n;
  for (const auto& s : partial) {
    total.tables += s.tables;
    total.constant += s.constant;
    total.balanced += s.balanced;
    total.neither += s.neither;
    total.correct += s.correct;
    total.max_deviation = std::max(total.max_deviation, s.max_deviation);
  }
  return total;
}

inline int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const SweepSummary s = sweep(args.n, args.alpha1, args.threads);
    const std::size_t promise = s.constant + s.balanced;
    if (args.machine) {
      nlohmann::ordered_json j;
      j["n"] = s.n;
      j["tables"] = s.tables;
      j["constant"] = s.constant;
      j["balanced"] = s.balanced;
      j["neither"] = s.neither;
      j["promise_correct"] = s.correct;
      j["max_deviation"] = s.max_deviation;
      out << j.dump(2) << '\n';
    } else {
      out << "n             " << s.n << '\n'
          << "tables        " << s.tables << '\n'
          << "constant      " << s.constant << '\n'
          << "balanced      " << s.balanced << '\n'
          << "neither       " << s.neither << '\n'
          << "correct       " << s.correct << " / " << promise << '\n'
          << "max deviation " << detail::sci(s.max_deviation) << " from closed form\n";
    }
    return s.correct == promise ? kExitOk : kExitError;
  } catch (const std::exception& e) {
    detail::report_error(err, e);
    return kExitError;
  }
}

}  // namespace thermodj::cli
