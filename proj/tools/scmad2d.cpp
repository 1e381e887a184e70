// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The scmad2d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// scmad2d: power allocation experiments for SCMA uplinks with D2D reuse.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "scmad2d/scmad2d.hpp"

namespace {

using namespace scmad2d;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct Options {
  std::string config;
  std::optional<int> seeds;
  std::optional<std::string> out;
  std::optional<int> tmax;
  std::optional<int> jd;
  bool trace = false;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

ExperimentSpec make_spec(ExperimentKind kind, const Options& opt, const std::string& defaultOut) {
  RunConfig rc = opt.config.empty() ? RunConfig{} : load_run_config(opt.config);
  if (opt.seeds) rc.numSeeds = *opt.seeds;
  if (opt.tmax) rc.tMax = *opt.tmax;
  if (opt.jd) rc.scenario.J_D = *opt.jd;
  rc.validate();
  ExperimentSpec spec = ExperimentSpec::from_run_config(kind, rc);
  spec.outputPath = opt.out.value_or(defaultOut);
  return spec;
}

int infeasible_exit(int feasible) { return feasible > 0 ? kExitOk : kExitInfeasible; }

int cmd_convergence(const Options& opt) {
  const auto spec = make_spec(ExperimentKind::convergence, opt, "convergence.csv");
  auto csv = open_output(spec.outputPath);
  std::optional<std::ofstream> trace;
  if (opt.trace) trace = open_output(spec.outputPath + ".trace.csv");
  const auto r = run_convergence(spec, &csv, trace ? &*trace : nullptr);
  int feasible = 0, within = 0;
  for (const auto& run : r.runs) {
    if (!run.feasible) continue;
    ++feasible;
    const int it = first_iteration_within(run.trace, 1e-3);
    if (it >= 1 && it <= 5) ++within;
  }
  std::cout << "seeds " << r.runs.size() << ", feasible " << feasible << ", infeasible " << r.infeasible
            << ", within 0.1% of final by iteration 5 on " << within << '\n'
            << "wrote " << spec.outputPath << '\n';
  return infeasible_exit(feasible);
}

int report_sweep(const ExperimentSpec& spec, const SweepResult& r) {
  auto samples = open_output(spec.outputPath);
  write_sweep_samples_csv(samples, r, spec);
  const std::string summaryPath = spec.outputPath + ".summary.csv";
  auto summary = open_output(summaryPath);
  write_sweep_summary_csv(summary, r, spec);
  write_sweep_summary_csv(std::cout, r, spec);
  std::cout << "wrote " << spec.outputPath << " and " << summaryPath << '\n';
  int feasible = 0;
  for (const auto& s : r.samples) feasible += s.feasible ? 1 : 0;
  return infeasible_exit(feasible);
}

int cmd_sweep(ExperimentKind kind, const Options& opt, const std::string& defaultOut) {
  const auto spec = make_spec(kind, opt, defaultOut);
  std::optional<std::ofstream> trace;
  if (opt.trace) trace = open_output(spec.outputPath + ".trace.csv");
  const auto r = kind == ExperimentKind::baselineComparison ? run_comparison(spec, trace ? &*trace : nullptr)
                                                            : run_sweep(spec, trace ? &*trace : nullptr);
  return report_sweep(spec, r);
}

int cmd_bounds(const Options& opt) {
  const auto spec = make_spec(ExperimentKind::boundValidation, opt, "bounds.csv");
  auto csv = open_output(spec.outputPath);
  const std::string capPath = spec.outputPath + ".capacity.csv";
  auto cap = open_output(capPath);
  const auto r = run_bound_validation(spec, &csv, &cap);
  std::cout << "draws " << r.draws << ", eigenvalue violations " << r.eigenvalueViolations
            << ", capacity violations " << r.capacityViolations << '\n'
            << "wrote " << spec.outputPath << " and " << capPath << '\n';
  return r.eigenvalueViolations + r.capacityViolations == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SCMA + D2D power allocation experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config, "key = value scenario file")->check(CLI::ExistingFile);
  app.add_option("--seeds", opt.seeds, "number of seeds (overrides numSeeds)");
  app.add_option("--out", opt.out, "output CSV path");
  app.add_option("--tmax", opt.tmax, "iteration cap T^max (overrides tMax)");
  app.add_option("--jd", opt.jd, "number of D2D pairs (overrides J_D)");
  app.add_flag("--trace", opt.trace, "also write the barrier solver trace to <out>.trace.csv");

  auto* convergence = app.add_subcommand("convergence", "per-iteration powers and sum rate per seed");
  auto* sweepCell = app.add_subcommand("sweep-cell", "sweep the cellular power cap P_0");
  auto* sweepD2d = app.add_subcommand("sweep-d2d", "sweep the D2D power cap P'_0");
  auto* bounds = app.add_subcommand("bounds", "eigenvalue and capacity bound validation");
  auto* compare = app.add_subcommand("compare", "proposed allocation against the random baseline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*convergence) return cmd_convergence(opt);
    if (*sweepCell) return cmd_sweep(ExperimentKind::sweepCellularCap, opt, "sweep_cell.csv");
    if (*sweepD2d) return cmd_sweep(ExperimentKind::sweepD2dCap, opt, "sweep_d2d.csv");
    if (*bounds) return cmd_bounds(opt);
    if (*compare) return cmd_sweep(ExperimentKind::baselineComparison, opt, "compare.csv");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
