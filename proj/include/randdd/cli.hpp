// Copyright 2026 The randdd Authors
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

#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "randdd/config.hpp"
#include "randdd/experiments.hpp"

namespace randdd {

enum class Command { kHelp, kValidate, kRun, kThreshold, kSweep, kCurves, kOracleCheck };

struct CliInvocation {
    Command command = Command::kHelp;
    ExperimentSpec spec;
    std::string help_text;
    // threshold subcommand
    bool no_control = false;
    std::string schedule_path;
    bool dump_schedule = false;
    bool dump_trajectory = false;
};

inline unsigned parse_threads(const std::string& s) {
    if (s == "auto") return 0;
    unsigned n = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc{} || ptr != s.data() + s.size() || n == 0) {
        throw UsageError("--threads expects a positive integer or 'auto', got '" + s + "'");
    }
    return n;
}

/// Parses the command line (without the program name). Throws UsageError.
inline CliInvocation parse_cli(const std::vector<std::string>& args) {
    CLI::App app{"Random dynamical-decoupling simulator for a dissipative qubit in an OU bath", "randdd"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path, out_dir, threads = "1", mode = "curve";
    std::optional<std::uint64_t> seed, ensemble;
    std::optional<double> step, grid_dt, tmax;
    std::vector<std::string> sets;
    bool plot = false;

    app.add_option("--config", config_path, "Key-value configuration file");
    app.add_option("--seed", seed, "Master seed (u64)");
    app.add_option("--ensemble", ensemble, "Ensemble size")->check(CLI::PositiveNumber);
    app.add_option("--step", step, "Maximum integrator step")->check(CLI::PositiveNumber);
    app.add_option("--grid-dt", grid_dt, "Output sampling interval")->check(CLI::PositiveNumber);
    app.add_option("--tmax", tmax, "Simulation horizon")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--threads", threads, "Worker threads: n or 'auto'");
    app.add_option("--set", sets, "Override a configuration key (key=value); repeatable");
    app.add_option("--mode", mode, "Ensemble crossing time: 'curve' (mean curve) or 'samples'")
        ->check(CLI::IsMember({"curve", "samples"}));
    app.add_flag("--plot-script", plot, "Also write a generic plotting script");

    CliInvocation inv;
    auto* validate_cmd = app.add_subcommand("validate", "Validate the configuration");
    auto* run_cmd = app.add_subcommand("run", "Run a named experiment");
    std::string experiment;
    std::vector<std::string> names;
    for (auto [e, s] : kExperimentNames) names.emplace_back(s);
    run_cmd->add_option("experiment", experiment, "Experiment name")->required()->check(CLI::IsMember(names));
    auto* threshold_cmd = app.add_subcommand("threshold", "Crossing time T for the configured parameters");
    threshold_cmd->add_flag("--no-control", inv.no_control, "Ignore the pulse train");
    threshold_cmd->add_option("--schedule", inv.schedule_path, "Replay a schedule CSV instead of generating");
    threshold_cmd->add_flag("--dump-schedule", inv.dump_schedule, "Write the (first) schedule as CSV");
    threshold_cmd->add_flag("--dump-trajectory", inv.dump_trajectory, "Write the (first) Q trajectory as CSV");
    auto* sweep_cmd = app.add_subcommand("sweep", "Fluctuation-scale sweep of T");
    std::string param = "phi";
    sweep_cmd->add_option("--param", param, "Fluctuating parameter")->check(CLI::IsMember({"phi", "tau", "delta"}));
    auto* curves_cmd = app.add_subcommand("curves", "Fidelity curves, regular vs random");
    std::string kind = "delta";
    curves_cmd->add_option("--kind", kind, "Curve family")->check(CLI::IsMember({"delta", "deltatau", "mu"}));
    auto* oracle_cmd = app.add_subcommand("oracle-check", "Cross-check against independent solutions");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        inv.command = Command::kHelp;
        inv.help_text = app.help();
        return inv;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    Settings s;
    if (!config_path.empty()) s = load_settings(config_path);
    for (const auto& kv : sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
        s.set(std::string(trim(std::string_view(kv).substr(0, eq))), std::string(trim(std::string_view(kv).substr(eq + 1))));
    }
    if (seed) s.set("sim.master_seed", std::to_string(*seed));
    if (ensemble) s.set("sim.ensemble_n", std::to_string(*ensemble));
    if (step) s.set("sim.step", csv::format(*step));
    if (grid_dt) s.set("sim.grid_dt", csv::format(*grid_dt));
    if (tmax) s.set("sim.t_max", csv::format(*tmax));

    inv.spec.overrides = s;
    inv.spec.output_dir = out_dir;
    inv.spec.threads = parse_threads(threads);
    inv.spec.threshold_mode = mode == "samples" ? ThresholdMode::kMeanOfSamples : ThresholdMode::kMeanCurve;
    inv.spec.plot_script = plot;

    if (*validate_cmd) {
        inv.command = Command::kValidate;
    } else if (*run_cmd) {
        inv.command = Command::kRun;
        inv.spec.name = parse_experiment_name(experiment);
    } else if (*threshold_cmd) {
        inv.command = Command::kThreshold;
    } else if (*sweep_cmd) {
        inv.command = Command::kSweep;
        inv.spec.name = param == "phi"   ? ExperimentName::kSweepPhi
                        : param == "tau" ? ExperimentName::kSweepTau
                                         : ExperimentName::kSweepDelta;
    } else if (*curves_cmd) {
        inv.command = Command::kCurves;
        inv.spec.name = kind == "delta"      ? ExperimentName::kCurvesDelta
                        : kind == "deltatau" ? ExperimentName::kCurvesDeltaTau
                                             : ExperimentName::kCurvesMu;
    } else if (*oracle_cmd) {
        inv.command = Command::kOracleCheck;
        inv.spec.name = ExperimentName::kOracleCheck;
    }
    return inv;
}

}  // namespace randdd
