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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "randdd/config.hpp"
#include "randdd/csv.hpp"
#include "randdd/fidelity.hpp"
#include "randdd/model.hpp"
#include "randdd/oracle.hpp"
#include "randdd/pulsegen.hpp"
#include "randdd/riccati.hpp"

namespace randdd {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ExperimentName {
    kBaselineNoControl,
    kSweepPhi,
    kSweepTau,
    kSweepDelta,
    kCurvesDelta,
    kCurvesDeltaTau,
    kCurvesMu,
    kOracleCheck,
};

inline constexpr std::array<std::pair<ExperimentName, std::string_view>, 8> kExperimentNames = {{
    {ExperimentName::kBaselineNoControl, "baseline-nocontrol"},
    {ExperimentName::kSweepPhi, "sweep-phi"},
    {ExperimentName::kSweepTau, "sweep-tau"},
    {ExperimentName::kSweepDelta, "sweep-delta"},
    {ExperimentName::kCurvesDelta, "curves-delta"},
    {ExperimentName::kCurvesDeltaTau, "curves-deltatau"},
    {ExperimentName::kCurvesMu, "curves-mu"},
    {ExperimentName::kOracleCheck, "oracle-check"},
}};

inline std::string_view experiment_name(ExperimentName n) {
    for (auto [e, s] : kExperimentNames) {
        if (e == n) return s;
    }
    return "unknown";
}

inline ExperimentName parse_experiment_name(std::string_view s) {
    for (auto [e, name] : kExperimentNames) {
        if (name == s) return e;
    }
    throw UsageError("unknown experiment '" + std::string(s) + "'");
}

/// How the crossing time of an ensemble is summarized.
enum class ThresholdMode {
    kMeanCurve,     // first crossing of the ensemble-mean curve
    kMeanOfSamples  // mean of per-sample first crossings
};

struct ExperimentSpec {
    ExperimentName name = ExperimentName::kBaselineNoControl;
    Settings overrides;
    std::string output_dir;  // empty: keep results in memory only
    unsigned threads = 1;    // 0 = hardware concurrency
    ThresholdMode threshold_mode = ThresholdMode::kMeanCurve;
    bool plot_script = false;
};

/// Named output files (name -> contents) plus the manifest.
struct ExperimentResult {
    std::map<std::string, std::string> files;
    nlohmann::json manifest;
    nlohmann::json summary;
};

/// 64-bit FNV-1a; identifies file contents in the manifest.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t x) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, x >>= 4) s[static_cast<std::size_t>(i)] = digits[x & 15];
    return s;
}

/// Standard pulse train: Phi = 0.2, tau = 0.02, Delta = 0.4 tau, with Gamma = omega = 1.
inline Bundle standard_bundle() {
    Bundle b;
    b.system = SystemParams{1.0, 1.0, 0.5};
    b.pulses = PulseParams{0.02, 0.008, 0.2, 0.0, 0.0, 0.0};
    b.sim = SimConfig{30.0, 1e-4, 0.01, 200, 20120101, 0.95};
    return b;
}

/// Default horizon per experiment (the uncontrolled decay and the slowest
/// controlled crossing at gamma = 0.2 both fit inside).
inline double default_horizon(ExperimentName n) {
    switch (n) {
        case ExperimentName::kBaselineNoControl:
            return 5.0;
        case ExperimentName::kSweepPhi:
        case ExperimentName::kSweepTau:
        case ExperimentName::kSweepDelta:
            return 80.0;
        case ExperimentName::kOracleCheck:
            return 10.0;
        default:
            return 30.0;
    }
}

inline Bundle resolve_bundle(ExperimentName n, const Settings& s) {
    Bundle b = standard_bundle();
    b.sim.t_max = default_horizon(n);
    return apply_settings(s, b);
}

namespace detail {

inline nlohmann::json bundle_json(const Bundle& b) {
    return {
        {"system", {{"omega", b.system.omega}, {"Gamma", b.system.Gamma}, {"gamma", b.system.gamma}}},
        {"pulses",
         {{"tau", b.pulses.tau},
          {"delta", b.pulses.delta},
          {"phi", b.pulses.phi},
          {"d_tau", b.pulses.d_tau},
          {"d_delta", b.pulses.d_delta},
          {"d_phi", b.pulses.d_phi}}},
        {"sim",
         {{"t_max", b.sim.t_max},
          {"step", b.sim.step},
          {"grid_dt", b.sim.grid_dt},
          {"ensemble_n", b.sim.ensemble_n},
          {"master_seed", b.sim.master_seed},
          {"threshold", b.sim.threshold}}},
    };
}

/// Uncontrolled trajectory (empty schedule).
inline QTrajectory integrate_free(const SystemParams& system, const SimConfig& sim) {
    PulseSchedule empty;
    empty.horizon = sim.t_max;
    return integrate(empty, system, sim);
}

struct ThresholdRow {
    std::string label;
    double gamma;
    double d_over_x;
    ThresholdResult result;
    double ci_low;
    double ci_high;
};

inline std::string threshold_rows_to_csv(const std::vector<ThresholdRow>& rows) {
    csv::Writer w({"label", "gamma", "d_over_x", "T", "crossed", "ci_low", "ci_high"});
    for (const auto& r : rows) {
        w.cell(r.label).cell(r.gamma).cell(r.d_over_x).cell(r.result.time).cell(r.result.crossed);
        w.cell(r.ci_low).cell(r.ci_high);
        w.end_row();
    }
    return w.str();
}

inline std::string format_label(std::string_view prefix, double x) { return std::string(prefix) + csv::format(x); }

}  // namespace detail

/// Crossing time for one parameter point: a single integration when the
/// train is regular, otherwise an ensemble with a bootstrap interval.
inline detail::ThresholdRow threshold_point(const Bundle& b, const ExperimentSpec& spec, std::string label,
                                            double d_over_x, std::size_t bootstrap_n) {
    validate(b);
    const auto w = FidelityWeights::haar_average();
    detail::ThresholdRow row{std::move(label), b.system.gamma, d_over_x, {}, 0.0, 0.0};
    if (b.pulses.is_regular()) {
        auto tr = integrate(generate_regular(b.pulses, b.sim.t_max), b.system, b.sim);
        row.result = threshold_time(fidelity_avg(tr), b.sim.threshold);
        row.ci_low = row.ci_high = row.result.time;
        return row;
    }
    auto run = run_ensemble(b.system, b.pulses, b.sim, EnsembleOptions{spec.threads});
    if (spec.threshold_mode == ThresholdMode::kMeanCurve) {
        row.result = threshold_time(run.mean(w), b.sim.threshold);
    } else {
        row.result = run.mean_of_sample_thresholds(w, b.sim.threshold);
    }
    std::tie(row.ci_low, row.ci_high) = run.bootstrap_threshold_ci(w, b.sim.threshold, bootstrap_n);
    return row;
}

namespace detail {

inline void run_baseline(const ExperimentSpec& spec, ExperimentResult& res) {
    Bundle base = resolve_bundle(spec.name, spec.overrides);
    std::vector<ThresholdRow> rows;
    for (double g : spec.overrides.get_list("sweep.gammas", {0.2, 0.5, 0.9})) {
        Bundle b = base;
        b.system.gamma = g;
        b.pulses = b.pulses.regular();
        validate(b);
        auto r = threshold_time(fidelity_avg(integrate_free(b.system, b.sim)), b.sim.threshold);
        rows.push_back({"baseline-nocontrol", g, 0.0, r, r.time, r.time});
        res.summary["T"][csv::format(g)] = r.time;
    }
    res.files["baseline-nocontrol.csv"] = threshold_rows_to_csv(rows);
}

inline void run_sweep(const ExperimentSpec& spec, ExperimentResult& res) {
    Bundle base = resolve_bundle(spec.name, spec.overrides);
    std::vector<double> ratios;
    switch (spec.name) {
        case ExperimentName::kSweepPhi:
            ratios = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
            break;
        case ExperimentName::kSweepTau:
            ratios = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55};
            break;
        default:
            ratios = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
            break;
    }
    ratios = spec.overrides.get_list("sweep.ratios", ratios);
    const auto bootstrap_n = spec.overrides.get_u64("sim.bootstrap_n", 200);
    const std::string label(experiment_name(spec.name));
    std::vector<ThresholdRow> rows;
    for (double g : spec.overrides.get_list("sweep.gammas", {0.2, 0.5, 0.9})) {
        for (double r : ratios) {
            Bundle b = base;
            b.system.gamma = g;
            b.pulses = b.pulses.regular();
            switch (spec.name) {
                case ExperimentName::kSweepPhi:
                    b.pulses.d_phi = r * std::abs(b.pulses.phi);
                    break;
                case ExperimentName::kSweepTau:
                    b.pulses.d_tau = r * b.pulses.tau;
                    break;
                default:
                    b.pulses.d_delta = r * b.pulses.delta;
                    break;
            }
            auto row = threshold_point(b, spec, label, r, bootstrap_n);
            res.summary["T"][csv::format(g)][csv::format(r)] = row.result.time;
            rows.push_back(std::move(row));
        }
    }
    res.files[label + ".csv"] = threshold_rows_to_csv(rows);
}

inline void emit_curve(ExperimentResult& res, const std::string& name, const FidelityCurve& c) {
    res.files[name + ".csv"] = curve_to_csv(c);
}

inline FidelityCurve regular_curve(const Bundle& b) {
    validate(b);
    auto c = fidelity_avg(integrate(generate_regular(b.pulses, b.sim.t_max), b.system, b.sim));
    c.meta.label = "regular";
    return c;
}

inline void run_curves(const ExperimentSpec& spec, ExperimentResult& res) {
    Bundle base = resolve_bundle(spec.name, spec.overrides);
    base.system.gamma = spec.overrides.get_double("curves.gamma", 0.3);
    const std::string prefix(experiment_name(spec.name));
    const double tau = base.pulses.tau;
    const EnsembleOptions eo{spec.threads};
    const auto haar = FidelityWeights::haar_average();

    {
        Bundle b = base;
        b.pulses = b.pulses.regular();
        auto c = fidelity_avg(integrate_free(b.system, b.sim));
        c.meta.label = "nocontrol";
        emit_curve(res, prefix + "_nocontrol", c);
    }

    if (spec.name == ExperimentName::kCurvesDelta) {
        // Deviations of 0.2 tau violate the non-overlap constraint at Delta = 0.75 tau;
        // that point uses the largest round value that fits.
        const std::map<double, double> default_dev = {{0.3, 0.2}, {0.4, 0.2}, {0.5, 0.2}, {0.75, 0.1}};
        for (double ratio : spec.overrides.get_list("curves.ratios", {0.3, 0.4, 0.5, 0.75})) {
            Bundle b = base;
            b.pulses.delta = ratio * tau;
            double dev = 0.2;
            if (auto it = default_dev.find(ratio); it != default_dev.end()) dev = it->second;
            if (spec.overrides.has("pulses.d_delta")) dev = base.pulses.d_delta / tau;
            b.pulses.d_delta = dev * tau;
            b.pulses.d_tau = spec.overrides.has("pulses.d_tau") ? base.pulses.d_tau : dev * tau;
            b.pulses.d_phi = base.pulses.d_phi;
            auto tag = detail::format_label("_ratio", ratio);
            auto reg = regular_curve(Bundle{b.system, b.pulses.regular(), b.sim, {}, {}});
            emit_curve(res, prefix + tag + "_regular", reg);
            validate(b);
            auto rnd = run_ensemble(b.system, b.pulses, b.sim, eo).mean(haar, "random");
            emit_curve(res, prefix + tag + "_random", rnd);
            double sup = 0.0, lo = 1.0;
            for (std::size_t i = 0; i < rnd.values.size(); ++i) {
                sup = std::max(sup, std::abs(rnd.values[i] - reg.values[i]));
                lo = std::min(lo, rnd.values[i]);
            }
            res.summary[csv::format(ratio)] = {{"sup_diff", sup}, {"random_min", lo}, {"dev_over_tau", dev}};
        }
    } else if (spec.name == ExperimentName::kCurvesDeltaTau) {
        const std::vector<std::pair<double, double>> combos = {{0.2, 0.0}, {0.0, 0.2}, {0.2, 0.2}};
        emit_curve(res, prefix + "_regular", regular_curve(Bundle{base.system, base.pulses.regular(), base.sim, {}, {}}));
        for (auto [dd, dt] : combos) {
            Bundle b = base;
            b.pulses.d_delta = dd * tau;
            b.pulses.d_tau = dt * tau;
            validate(b);
            auto c = run_ensemble(b.system, b.pulses, b.sim, eo).mean(haar, "random");
            std::string tag = "_dd" + csv::format(dd) + "_dt" + csv::format(dt);
            double lo = 1.0;
            for (double v : c.values) lo = std::min(lo, v);
            res.summary[tag.substr(1)] = {{"random_min", lo}};
            emit_curve(res, prefix + tag, c);
        }
    } else {
        Bundle b = base;
        if (!spec.overrides.has("pulses.d_delta")) b.pulses.d_delta = 0.2 * tau;
        if (!spec.overrides.has("pulses.d_tau")) b.pulses.d_tau = 0.2 * tau;
        validate(b);
        auto run = run_ensemble(b.system, b.pulses, b.sim, eo);
        for (double p : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
            auto c = run.mean(FidelityWeights::pure(p), "pure |mu|^2=" + csv::format(p));
            emit_curve(res, prefix + detail::format_label("_mu2_", p), c);
        }
    }
}

struct OracleCase {
    std::string name;
    double max_closed_form_dev = 0.0;
    double max_pop_dev = 0.0;
    double max_cohmod_dev = 0.0;
    double max_cohphase_dev = 0.0;
    double max_fidelity_dev = 0.0;
};

/// Runs the QSD pipeline and the pseudomode solver on one schedule.
inline OracleCase oracle_case(std::string name, const PulseSchedule& schedule, const SystemParams& system,
                              const InitialState& init, const SimConfig& sim, int n_max = 1) {
    OracleCase oc;
    oc.name = std::move(name);
    const auto tr = integrate(schedule, system, sim);
    const auto pm = pseudomode_evolve(schedule, system, init, sim, PseudomodeOptions{n_max});
    const double p = std::norm(init.mu);
    const auto pure = fidelity_pure(tr, init);
    std::vector<complex> qsd10(tr.grid.size()), pm10(tr.grid.size());
    for (std::size_t k = 0; k < tr.grid.size(); ++k) {
        const complex e = std::exp(-tr.states[k].j);
        const auto red = reduce_qubit(pm[k].rho, n_max);
        qsd10[k] = init.mu * std::conj(init.nu) * e;
        pm10[k] = red.rho10;
        oc.max_pop_dev = std::max(oc.max_pop_dev, std::abs(red.rho11 - p * std::norm(e)));
        // Fidelity from the pseudomode state in the co-rotating frame.
        const double phase = system.omega * tr.grid[k] + field_integral(schedule, tr.grid[k]);
        const complex rot10 = red.rho10 * std::polar(1.0, phase);
        const double f_pm = p * red.rho11 + std::norm(init.nu) * (1.0 - red.rho11) +
                            2.0 * (std::conj(init.mu) * init.nu * rot10).real();
        oc.max_fidelity_dev = std::max(oc.max_fidelity_dev, std::abs(f_pm - pure.values[k]));
    }
    auto cmp = compare_frames(tr.grid, qsd10, pm10, schedule, system);
    oc.max_cohmod_dev = cmp.max_cohmod_dev;
    oc.max_cohphase_dev = cmp.max_cohphase_dev;
    if (schedule.pulses.empty()) {
        ClosedFormNoControl cf(system);
        for (std::size_t k = 0; k < tr.grid.size(); ++k) {
            oc.max_closed_form_dev =
                std::max(oc.max_closed_form_dev, std::abs(std::exp(-tr.states[k].j) - cf.barQ(tr.grid[k])));
        }
    }
    return oc;
}

inline void run_oracle_check(const ExperimentSpec& spec, ExperimentResult& res) {
    Bundle base = resolve_bundle(spec.name, spec.overrides);
    validate(base);
    const InitialState init = InitialState::from_population(spec.overrides.get_double("state.mu2", 0.5));
    PulseSchedule empty;
    empty.horizon = base.sim.t_max;

    SystemParams s02 = base.system;
    s02.gamma = spec.overrides.get_double("system.gamma", 0.2);
    SystemParams s03 = base.system;
    s03.gamma = spec.overrides.get_double("system.gamma", 0.3);
    PulseParams random_pulses = base.pulses;
    if (random_pulses.is_regular()) random_pulses.d_delta = random_pulses.d_tau = 0.2 * random_pulses.tau;
    validate_pulses(random_pulses);

    std::vector<OracleCase> cases;
    cases.push_back(oracle_case("nocontrol", empty, s02, init, base.sim));
    cases.push_back(oracle_case("regular", generate_regular(base.pulses.regular(), base.sim.t_max), s03, init,
                                base.sim));
    cases.push_back(oracle_case("random",
                                generate_random(random_pulses, base.sim.t_max, RandomStream(base.sim.master_seed, 0)),
                                s03, init, base.sim));

    // Truncation check: n_max = 1 and n_max = 2 must agree.
    double nmax_dev = 0.0;
    {
        auto sched = generate_regular(base.pulses.regular(), base.sim.t_max);
        auto a = pseudomode_evolve(sched, s03, init, base.sim, PseudomodeOptions{1});
        auto b = pseudomode_evolve(sched, s03, init, base.sim, PseudomodeOptions{2});
        for (std::size_t k = 0; k < a.size(); ++k) {
            auto ra = reduce_qubit(a[k].rho, 1);
            auto rb = reduce_qubit(b[k].rho, 2);
            nmax_dev = std::max({nmax_dev, std::abs(ra.rho11 - rb.rho11), std::abs(ra.rho10 - rb.rho10)});
        }
    }

    nlohmann::json report;
    report["max_pop_dev"] = 0.0;
    report["max_cohmod_dev"] = 0.0;
    report["max_cohphase_dev"] = 0.0;
    report["max_fidelity_dev"] = 0.0;
    report["max_closed_form_dev"] = cases.front().max_closed_form_dev;
    report["max_nmax_dev"] = nmax_dev;
    for (const auto& c : cases) {
        report["max_pop_dev"] = std::max(report["max_pop_dev"].get<double>(), c.max_pop_dev);
        report["max_cohmod_dev"] = std::max(report["max_cohmod_dev"].get<double>(), c.max_cohmod_dev);
        report["max_cohphase_dev"] = std::max(report["max_cohphase_dev"].get<double>(), c.max_cohphase_dev);
        report["max_fidelity_dev"] = std::max(report["max_fidelity_dev"].get<double>(), c.max_fidelity_dev);
        report["cases"].push_back({{"name", c.name},
                                   {"max_closed_form_dev", c.max_closed_form_dev},
                                   {"max_pop_dev", c.max_pop_dev},
                                   {"max_cohmod_dev", c.max_cohmod_dev},
                                   {"max_cohphase_dev", c.max_cohphase_dev},
                                   {"max_fidelity_dev", c.max_fidelity_dev}});
    }
    report["params"] = bundle_json(base);
    report["params"]["gamma_nocontrol"] = s02.gamma;
    report["params"]["gamma_control"] = s03.gamma;
    report["params"]["mu2"] = std::norm(init.mu);
    report["params"]["random_pulses"] = {{"d_tau", random_pulses.d_tau}, {"d_delta", random_pulses.d_delta},
                                         {"d_phi", random_pulses.d_phi}};
    report["seeds"] = {{"master_seed", base.sim.master_seed}, {"random_stream", 0}};
    report["closed_form_note"] =
        "no-control reference is Qbar(t) = (l2 e^{l1 t} - l1 e^{l2 t})/(l2 - l1); as a damped cosine its envelope is "
        "e^{-gt t/2} with amplitude 1/sqrt(1 - gt^2/(2 Gamma gamma)), gt = gamma - i omega";
    res.summary = report;
    res.files["oracle-check.json"] = report.dump(2) + "\n";
}

inline std::string plot_script() {
    return R"PY(#!/usr/bin/env python3
# Plots every curve and threshold CSV in this directory.
import csv, glob, os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
curves = sorted(p for p in glob.glob(os.path.join(here, "*.csv")) if "sweep" not in p and "baseline" not in p)
if curves:
    fig, ax = plt.subplots()
    for p in curves:
        rows = list(csv.DictReader(open(p)))
        ax.plot([float(r["t"]) for r in rows], [float(r["fidelity"]) for r in rows], label=os.path.basename(p)[:-4])
    ax.set_xlabel("omega t"); ax.set_ylabel("fidelity"); ax.legend(fontsize=6)
    fig.savefig(os.path.join(here, "curves.png"), dpi=150)
for p in glob.glob(os.path.join(here, "sweep-*.csv")):
    rows = list(csv.DictReader(open(p)))
    fig, ax = plt.subplots()
    for g in sorted({r["gamma"] for r in rows}, key=float):
        sel = [r for r in rows if r["gamma"] == g]
        ax.errorbar([float(r["d_over_x"]) for r in sel], [float(r["T"]) for r in sel],
                    yerr=[[float(r["T"]) - float(r["ci_low"]) for r in sel],
                          [float(r["ci_high"]) - float(r["T"]) for r in sel]], label="gamma=" + g, capsize=2)
    ax.set_xlabel("D_X / X"); ax.set_ylabel("T (omega t)"); ax.legend()
    fig.savefig(p[:-4] + ".png", dpi=150)
)PY";
}

}  // namespace detail

/// Runs one experiment, writes its files (when output_dir is set) and returns
/// them with a manifest listing the resolved parameters and file checksums.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    const auto started = std::chrono::steady_clock::now();
    ExperimentResult res;
    switch (spec.name) {
        case ExperimentName::kBaselineNoControl:
            detail::run_baseline(spec, res);
            break;
        case ExperimentName::kSweepPhi:
        case ExperimentName::kSweepTau:
        case ExperimentName::kSweepDelta:
            detail::run_sweep(spec, res);
            break;
        case ExperimentName::kCurvesDelta:
        case ExperimentName::kCurvesDeltaTau:
        case ExperimentName::kCurvesMu:
            detail::run_curves(spec, res);
            break;
        case ExperimentName::kOracleCheck:
            detail::run_oracle_check(spec, res);
            break;
    }
    if (spec.plot_script) res.files["plot.py"] = detail::plot_script();

    const Bundle resolved = resolve_bundle(spec.name, spec.overrides);
    auto& m = res.manifest;
    m["experiment"] = std::string(experiment_name(spec.name));
    m["tool_version"] = std::string(kToolVersion);
    m["master_seed"] = resolved.sim.master_seed;
    m["params"] = detail::bundle_json(resolved);
    m["overrides"] = spec.overrides.values();
    m["threshold_mode"] = spec.threshold_mode == ThresholdMode::kMeanCurve ? "mean-curve" : "mean-of-samples";
    for (const auto& [name, text] : res.files) m["files"][name] = "fnv1a64:" + hex64(fnv1a64(text));
    m["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (!spec.output_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(spec.output_dir);
        for (const auto& [name, text] : res.files) {
            std::ofstream f(fs::path(spec.output_dir) / name, std::ios::binary);
            if (!f) throw Error("cannot write '" + (fs::path(spec.output_dir) / name).string() + "'");
            f << text;
        }
        std::ofstream f(fs::path(spec.output_dir) / (std::string(experiment_name(spec.name)) + ".manifest.json"),
                        std::ios::binary);
        f << m.dump(2) << "\n";
    }
    return res;
}

}  // namespace randdd
