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

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "randdd/cli.hpp"
#include "randdd/experiments.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw randdd::Error("cannot write '" + (fs::path(dir) / name).string() + "'");
    f << text;
}

int cmd_validate(const randdd::CliInvocation& inv) {
    auto b = randdd::validate(randdd::apply_settings(inv.spec.overrides, randdd::standard_bundle()));
    std::cout << "valid\n";
    for (const auto& w : b.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

int cmd_threshold(const randdd::CliInvocation& inv) {
    using namespace randdd;
    Bundle b = validate(apply_settings(inv.spec.overrides, standard_bundle()));
    for (const auto& w : b.warnings) std::cerr << "warning: " << w << "\n";
    const std::string out = inv.spec.output_dir.empty() ? "." : inv.spec.output_dir;
    const auto weights = b.init ? FidelityWeights::pure(b.init->excited_population()) : FidelityWeights::haar_average();

    detail::ThresholdRow row{"threshold", b.system.gamma, 0.0, {}, 0.0, 0.0};
    if (inv.no_control || inv.schedule_path.size() || b.pulses.is_regular()) {
        PulseSchedule sched;
        if (inv.no_control) {
            sched.horizon = b.sim.t_max;
            row.label = "nocontrol";
        } else if (!inv.schedule_path.empty()) {
            sched = load_schedule(inv.schedule_path);
            sched.horizon = std::max(sched.horizon, b.sim.t_max);
            row.label = "replay";
        } else {
            sched = generate_regular(b.pulses, b.sim.t_max);
            row.label = "regular";
        }
        auto tr = integrate(sched, b.system, b.sim);
        auto c = apply_weights(tr, weights, row.label);
        row.result = threshold_time(c, b.sim.threshold);
        row.ci_low = row.ci_high = row.result.time;
        if (inv.dump_schedule) write_file(out, "schedule.csv", schedule_to_csv(sched));
        if (inv.dump_trajectory) write_file(out, "trajectory.csv", trajectory_to_csv(tr));
        write_file(out, "curve.csv", curve_to_csv(c));
    } else {
        row.label = "random";
        auto run = run_ensemble(b.system, b.pulses, b.sim, EnsembleOptions{inv.spec.threads});
        row.result = inv.spec.threshold_mode == ThresholdMode::kMeanCurve
                         ? threshold_time(run.mean(weights), b.sim.threshold)
                         : run.mean_of_sample_thresholds(weights, b.sim.threshold);
        std::tie(row.ci_low, row.ci_high) =
            run.bootstrap_threshold_ci(weights, b.sim.threshold, inv.spec.overrides.get_u64("sim.bootstrap_n", 200));
        if (inv.dump_schedule || inv.dump_trajectory) {
            auto sched = generate_random(b.pulses, b.sim.t_max, RandomStream(b.sim.master_seed, 0));
            if (inv.dump_schedule) write_file(out, "schedule.csv", schedule_to_csv(sched));
            if (inv.dump_trajectory) write_file(out, "trajectory.csv", trajectory_to_csv(integrate(sched, b.system, b.sim)));
        }
        write_file(out, "curve.csv", curve_to_csv(run.mean(weights)));
    }
    row.d_over_x = 0.0;
    write_file(out, "threshold.csv", detail::threshold_rows_to_csv({row}));
    std::cout << "T = " << csv::format(row.result.time) << (row.result.crossed ? "" : " (not crossed)")
              << "  CI [" << csv::format(row.ci_low) << ", " << csv::format(row.ci_high) << "]\n";
    return 0;
}

int cmd_experiment(const randdd::CliInvocation& inv) {
    randdd::ExperimentSpec spec = inv.spec;
    if (spec.output_dir.empty()) spec.output_dir = "results";
    auto res = randdd::run_experiment(spec);
    for (const auto& [name, text] : res.files) std::cout << spec.output_dir << "/" << name << "\n";
    if (!res.summary.is_null()) std::cout << res.summary.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        auto inv = randdd::parse_cli(args);
        switch (inv.command) {
            case randdd::Command::kHelp:
                std::cout << inv.help_text;
                return 0;
            case randdd::Command::kValidate:
                return cmd_validate(inv);
            case randdd::Command::kThreshold:
                return cmd_threshold(inv);
            default:
                return cmd_experiment(inv);
        }
    } catch (const randdd::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const randdd::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const randdd::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
