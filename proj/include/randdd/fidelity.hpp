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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "randdd/csv.hpp"
#include "randdd/model.hpp"
#include "randdd/parallel.hpp"
#include "randdd/pulsegen.hpp"
#include "randdd/random_stream.hpp"
#include "randdd/riccati.hpp"

namespace randdd {

struct CurveMeta {
    std::string label = "Haar-averaged";
    std::size_t ensemble_n = 1;
    std::uint64_t master_seed = 0;
};

struct FidelityCurve {
    std::vector<double> grid;
    std::vector<double> values;
    std::optional<std::vector<double>> std_error;
    CurveMeta meta;
};

struct ThresholdResult {
    double time = 0.0;
    double threshold = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
    bool crossed = false;
};

/// Fidelity as an affine function of the two decay factors
///     population = exp(-2 Re J),  coherence = Re exp(-J):
///     F = constant + population_weight * population + coherence_weight * coherence.
struct FidelityWeights {
    double constant = 0.5;
    double population = 1.0 / 6.0;
    double coherence = 1.0 / 3.0;

    /// Uniform average over pure initial states.
    static FidelityWeights haar_average() { return {}; }

    /// Pure initial state with excited population p = |mu|^2.
    static FidelityWeights pure(double p) { return {1.0 - p, -(p - 2.0 * p * p), 2.0 * p * (1.0 - p)}; }

    double operator()(double pop, double coh) const { return constant + population * pop + coherence * coh; }
};

struct DecayFactors {
    std::vector<double> population;
    std::vector<double> coherence;
};

inline DecayFactors decay_factors(const QTrajectory& tr) {
    DecayFactors f;
    f.population.reserve(tr.states.size());
    f.coherence.reserve(tr.states.size());
    for (const QState& s : tr.states) {
        f.population.push_back(std::exp(-2.0 * s.j.real()));
        f.coherence.push_back(std::exp(-s.j).real());
    }
    return f;
}

inline FidelityCurve apply_weights(const QTrajectory& tr, const FidelityWeights& w, std::string label) {
    FidelityCurve c;
    c.grid = tr.grid;
    c.values.reserve(tr.states.size());
    for (const QState& s : tr.states) {
        c.values.push_back(w(std::exp(-2.0 * s.j.real()), std::exp(-s.j).real()));
    }
    c.meta.label = std::move(label);
    return c;
}

/// Survival probability of a pure initial state.
inline FidelityCurve fidelity_pure(const QTrajectory& tr, const InitialState& init) {
    const double p = std::norm(init.mu) / (std::norm(init.mu) + std::norm(init.nu));
    return apply_weights(tr, FidelityWeights::pure(p), "pure |mu|^2=" + csv::format(p));
}

/// Fidelity averaged over all pure initial states.
inline FidelityCurve fidelity_avg(const QTrajectory& tr) {
    return apply_weights(tr, FidelityWeights::haar_average(), "Haar-averaged");
}

/// Uniformly distributed pure qubit state: two complex Gaussians, normalized.
inline InitialState sample_haar_state(RandomStream& rng) {
    double a = rng.normal(), b = rng.normal(), c = rng.normal(), d = rng.normal();
    return normalized(InitialState{complex(a, b), complex(c, d)});
}

/// First downward crossing of theta, localized by linear interpolation.
inline ThresholdResult threshold_time(std::span<const double> grid, std::span<const double> values, double theta) {
    if (values.empty() || !(values.front() > theta)) {
        throw std::invalid_argument("threshold_time: curve-starts-below-threshold");
    }
    ThresholdResult r;
    r.threshold = theta;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (values[i] >= theta && values[i + 1] < theta) {
            const double frac = (values[i] - theta) / (values[i] - values[i + 1]);
            r.time = grid[i] + frac * (grid[i + 1] - grid[i]);
            r.bracket = {grid[i], grid[i + 1]};
            r.crossed = true;
            return r;
        }
    }
    r.time = grid.back();
    r.bracket = {grid.back(), grid.back()};
    return r;
}

inline ThresholdResult threshold_time(const FidelityCurve& c, double theta) {
    return threshold_time(c.grid, c.values, theta);
}

struct EnsembleOptions {
    unsigned threads = 1;  // 0 = hardware concurrency
    IntegrateOptions integrate{};
};

/// Per-sample decay factors of an ensemble of random schedules; sample k uses
/// stream (master_seed, k). Any fidelity curve (Haar-averaged or pure) is then
/// an affine image of these, so one ensemble serves every initial state.
class EnsembleRun {
   public:
    EnsembleRun(std::vector<double> grid, std::vector<DecayFactors> samples, std::uint64_t seed)
        : grid_(std::move(grid)), samples_(std::move(samples)), seed_(seed) {}

    const std::vector<double>& grid() const { return grid_; }
    std::size_t size() const { return samples_.size(); }
    std::uint64_t master_seed() const { return seed_; }
    const DecayFactors& sample(std::size_t k) const { return samples_[k]; }

    std::vector<double> sample_curve(std::size_t k, const FidelityWeights& w) const {
        const auto& s = samples_[k];
        std::vector<double> v(grid_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w(s.population[i], s.coherence[i]);
        return v;
    }

    /// Pointwise mean and standard error, reduced in ascending sample order.
    FidelityCurve mean(const FidelityWeights& w, std::string label = "Haar-averaged") const {
        const std::size_t n = samples_.size();
        FidelityCurve c;
        c.grid = grid_;
        c.values.assign(grid_.size(), 0.0);
        std::vector<double> se(grid_.size(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& s = samples_[k];
            for (std::size_t i = 0; i < grid_.size(); ++i) c.values[i] += w(s.population[i], s.coherence[i]);
        }
        for (double& v : c.values) v /= static_cast<double>(n);
        if (n > 1) {
            for (std::size_t k = 0; k < n; ++k) {
                const auto& s = samples_[k];
                for (std::size_t i = 0; i < grid_.size(); ++i) {
                    const double d = w(s.population[i], s.coherence[i]) - c.values[i];
                    se[i] += d * d;
                }
            }
            const double norm = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n));
            for (double& v : se) v = std::sqrt(v * norm);
        }
        c.std_error = std::move(se);
        c.meta = CurveMeta{std::move(label), n, seed_};
        return c;
    }

    /// Mean over samples of each sample's own first-crossing time. Samples that
    /// never cross contribute the horizon.
    ThresholdResult mean_of_sample_thresholds(const FidelityWeights& w, double theta) const {
        ThresholdResult r;
        r.threshold = theta;
        r.crossed = true;
        double acc = 0.0;
        for (std::size_t k = 0; k < samples_.size(); ++k) {
            auto v = sample_curve(k, w);
            auto t = threshold_time(grid_, v, theta);
            acc += t.time;
            r.crossed = r.crossed && t.crossed;
        }
        r.time = acc / static_cast<double>(samples_.size());
        r.bracket = {r.time, r.time};
        return r;
    }

    /// Percentile bootstrap interval for the crossing time of the mean curve.
    std::pair<double, double> bootstrap_threshold_ci(const FidelityWeights& w, double theta, std::size_t replicates,
                                                     double level = 0.95) const {
        const std::size_t n = samples_.size();
        if (n < 2 || replicates == 0) {
            auto t = threshold_time(mean(w).grid, mean(w).values, theta);
            return {t.time, t.time};
        }
        RandomStream rng(seed_, kAuxiliaryStreamBase + 1);
        std::vector<std::size_t> pick(n);
        std::vector<double> times;
        times.reserve(replicates);
        for (std::size_t b = 0; b < replicates; ++b) {
            for (auto& p : pick) p = rng.below(n);
            // Walk the resampled mean forward until it first drops below theta.
            double prev_t = grid_[0], prev_v = 1.0, t_cross = grid_.back();
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                double acc = 0.0;
                for (std::size_t k : pick) acc += w(samples_[k].population[i], samples_[k].coherence[i]);
                const double v = acc / static_cast<double>(n);
                if (i > 0 && prev_v >= theta && v < theta) {
                    t_cross = prev_t + (prev_v - theta) / (prev_v - v) * (grid_[i] - prev_t);
                    break;
                }
                prev_t = grid_[i];
                prev_v = v;
            }
            times.push_back(t_cross);
        }
        std::sort(times.begin(), times.end());
        auto quantile = [&](double q) {
            const double pos = q * static_cast<double>(times.size() - 1);
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const auto hi = std::min(lo + 1, times.size() - 1);
            return times[lo] + (pos - static_cast<double>(lo)) * (times[hi] - times[lo]);
        };
        const double tail = 0.5 * (1.0 - level);
        return {quantile(tail), quantile(1.0 - tail)};
    }

   private:
    std::vector<double> grid_;
    std::vector<DecayFactors> samples_;
    std::uint64_t seed_;
};

/// Integrates one random schedule per sample index and collects decay factors.
/// Results are identical for any thread count.
inline EnsembleRun run_ensemble(const SystemParams& system, const PulseParams& pulses, const SimConfig& sim,
                                const EnsembleOptions& opt = {}) {
    std::vector<DecayFactors> samples(sim.ensemble_n);
    parallel_for(sim.ensemble_n, opt.threads, [&](std::size_t k) {
        try {
            auto schedule = generate_random(pulses, sim.t_max, RandomStream(sim.master_seed, k));
            samples[k] = decay_factors(integrate(schedule, system, sim, opt.integrate));
        } catch (const NumericalError& e) {
            throw NumericalError("ensemble sample " + std::to_string(k) + " (master_seed " +
                                 std::to_string(sim.master_seed) + ", stream " + std::to_string(k) + "): " + e.what());
        }
    });
    return EnsembleRun(make_grid(sim.t_max, sim.grid_dt), std::move(samples), sim.master_seed);
}

/// Ensemble-mean Haar-averaged fidelity with standard errors.
inline FidelityCurve ensemble_mean(const SystemParams& system, const PulseParams& pulses, const SimConfig& sim,
                                   const EnsembleOptions& opt = {}) {
    return run_ensemble(system, pulses, sim, opt).mean(FidelityWeights::haar_average());
}

/// Curve CSV: t, fidelity, stderr (0 where no ensemble error is available).
inline std::string curve_to_csv(const FidelityCurve& c) {
    csv::Writer w({"t", "fidelity", "stderr"});
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
        w.cell(c.grid[i]).cell(c.values[i]).cell(c.std_error ? (*c.std_error)[i] : 0.0);
        w.end_row();
    }
    return w.str();
}

}  // namespace randdd
