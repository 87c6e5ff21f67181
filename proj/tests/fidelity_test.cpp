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

#include "randdd/fidelity.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "randdd/oracle.hpp"

using namespace randdd;

namespace {

SimConfig sim_for(double t_max, double grid_dt = 0.01, std::size_t n = 1, std::uint64_t seed = 7) {
    SimConfig c;
    c.t_max = t_max;
    c.grid_dt = grid_dt;
    c.ensemble_n = n;
    c.master_seed = seed;
    return c;
}

QTrajectory free_run(double gamma, double t_max, double grid_dt = 0.01) {
    PulseSchedule s;
    s.horizon = t_max;
    return integrate(s, {1.0, 1.0, gamma}, sim_for(t_max, grid_dt));
}

const PulseParams kNoisy{0.02, 0.008, 0.2, 0.004, 0.004, 0.0};

}  // namespace

TEST(Fidelity, starts_at_one) {
    auto tr = free_run(0.5, 1.0);
    EXPECT_DOUBLE_EQ(fidelity_avg(tr).values.front(), 1.0);
    for (double p : {0.0, 0.3, 1.0}) {
        EXPECT_DOUBLE_EQ(fidelity_pure(tr, InitialState::from_population(p)).values.front(), 1.0);
    }
}

TEST(Fidelity, ground_state_never_decays) {
    auto tr = free_run(0.5, 5.0);
    for (double f : fidelity_pure(tr, InitialState{0.0, 1.0}).values) EXPECT_EQ(f, 1.0);
}

TEST(Fidelity, excited_state_survival_is_population_decay) {
    SystemParams s{1.0, 1.0, 0.2};
    auto tr = free_run(0.2, 5.0);
    auto f = fidelity_pure(tr, InitialState{1.0, 0.0});
    ClosedFormNoControl cf(s);
    for (std::size_t k = 0; k < tr.grid.size(); ++k) {
        EXPECT_NEAR(f.values[k], std::norm(cf.barQ(tr.grid[k])), 1e-8);
    }
}

TEST(Fidelity, haar_average_at_reported_baseline_time) {
    SystemParams s{1.0, 1.0, 0.2};
    const complex b = closed_form_barQ(s, 1.42);
    const double fm = FidelityWeights::haar_average()(std::norm(b), b.real());
    EXPECT_NEAR(fm, 0.950, 0.001);
}

TEST(Fidelity, haar_average_is_mean_of_pure_state_fidelities) {
    auto tr = free_run(0.3, 4.0, 0.2);
    auto avg = fidelity_avg(tr);
    RandomStream rng(123, kAuxiliaryStreamBase);
    const int n = 20000;
    std::vector<double> m1(tr.grid.size(), 0.0), m2(tr.grid.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        auto f = fidelity_pure(tr, sample_haar_state(rng));
        for (std::size_t k = 0; k < f.values.size(); ++k) {
            m1[k] += f.values[k];
            m2[k] += f.values[k] * f.values[k];
        }
    }
    for (std::size_t k = 1; k < tr.grid.size(); ++k) {
        const double mean = m1[k] / n;
        const double se = std::sqrt((m2[k] / n - mean * mean) / (n - 1));
        EXPECT_NEAR(mean, avg.values[k], 4.0 * se) << tr.grid[k];
    }
}

TEST(Fidelity, pure_state_sees_coherence_phase) {
    // Same Re J, different Im J: population term equal, coherence term differs.
    QTrajectory a, b;
    a.grid = b.grid = {0.0, 1.0};
    a.states = {QState{}, QState{0.0, complex(0.2, 0.0)}};
    b.states = {QState{}, QState{0.0, complex(0.2, 1.0)}};
    auto init = InitialState::from_population(0.5);
    EXPECT_GT(fidelity_pure(a, init).values[1] - fidelity_pure(b, init).values[1], 0.1);
    EXPECT_GT(fidelity_avg(a).values[1], fidelity_avg(b).values[1]);
}

TEST(Fidelity, stays_in_unit_interval) {
    for (double gamma : {0.2, 0.5, 0.9, 20.0}) {
        auto tr = integrate(generate_random(kNoisy, 10.0, RandomStream(4, 0)), {1.0, 1.0, gamma}, sim_for(10.0));
        for (double f : fidelity_avg(tr).values) {
            EXPECT_GE(f, 0.0);
            EXPECT_LE(f, 1.0 + 1e-9);
        }
    }
}

TEST(Threshold, baseline_examples) {
    auto t02 = threshold_time(fidelity_avg(free_run(0.2, 5.0)), 0.95);
    auto t09 = threshold_time(fidelity_avg(free_run(0.9, 5.0)), 0.95);
    EXPECT_TRUE(t02.crossed);
    EXPECT_NEAR(t02.time, 1.42, 0.02);
    EXPECT_NEAR(t09.time, 0.65, 0.02);
    EXPECT_LE(t02.bracket.first, t02.time);
    EXPECT_GE(t02.bracket.second, t02.time);
}

TEST(Threshold, interpolates_linearly) {
    std::vector<double> g{0.0, 1.0, 2.0}, v{1.0, 0.96, 0.94};
    auto r = threshold_time(g, v, 0.95);
    EXPECT_NEAR(r.time, 1.5, 1e-15);
    EXPECT_EQ(r.bracket, std::make_pair(1.0, 2.0));
}

TEST(Threshold, uncrossed_curve_reports_horizon) {
    std::vector<double> g{0.0, 1.0, 2.0}, v{1.0, 1.0, 1.0};
    auto r = threshold_time(g, v, 0.95);
    EXPECT_FALSE(r.crossed);
    EXPECT_EQ(r.time, 2.0);
}

TEST(Threshold, curve_starting_below_threshold_is_an_error) {
    std::vector<double> g{0.0, 1.0}, v{0.9, 0.8};
    EXPECT_THROW(threshold_time(g, v, 0.95), std::invalid_argument);
}

TEST(Threshold, insensitive_to_grid_refinement) {
    const double coarse = threshold_time(fidelity_avg(free_run(0.5, 3.0, 0.02)), 0.95).time;
    const double fine = threshold_time(fidelity_avg(free_run(0.5, 3.0, 0.01)), 0.95).time;
    EXPECT_LT(std::abs(coarse - fine), 0.02);
}

TEST(Ensemble, single_regular_sample_equals_regular_curve) {
    const PulseParams regular{0.02, 0.008, 0.2};
    SystemParams s{1.0, 1.0, 0.3};
    auto sim = sim_for(3.0);
    auto mean = ensemble_mean(s, regular, sim);
    auto reg = fidelity_avg(integrate(generate_regular(regular, 3.0), s, sim));
    EXPECT_EQ(mean.values, reg.values);
    ASSERT_TRUE(mean.std_error);
    for (double e : *mean.std_error) EXPECT_EQ(e, 0.0);
}

TEST(Ensemble, bit_identical_across_thread_counts) {
    SystemParams s{1.0, 1.0, 0.3};
    auto sim = sim_for(2.0, 0.01, 12, 99);
    auto one = ensemble_mean(s, kNoisy, sim, EnsembleOptions{1});
    auto four = ensemble_mean(s, kNoisy, sim, EnsembleOptions{4});
    EXPECT_EQ(one.values, four.values);
    EXPECT_EQ(*one.std_error, *four.std_error);
    EXPECT_EQ(curve_to_csv(one), curve_to_csv(four));
}

TEST(Ensemble, blow_up_names_the_sample) {
    EnsembleOptions opt;
    opt.integrate.blowup_bound = 1e-3;
    try {
        run_ensemble({1.0, 1.0, 0.3}, kNoisy, sim_for(1.0, 0.01, 3, 5), opt);
        FAIL() << "expected a NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("ensemble sample 0"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("master_seed 5"), std::string::npos) << e.what();
    }
}

TEST(Ensemble, standard_error_shrinks_as_inverse_sqrt_n) {
    SystemParams s{1.0, 1.0, 0.3};
    const PulseParams wild{0.05, 0.02, 0.5, 0.02, 0.01, 0.5};
    double se[3];
    const std::size_t ns[3] = {50, 200, 800};
    for (int i = 0; i < 3; ++i) {
        auto c = ensemble_mean(s, wild, sim_for(2.0, 0.5, ns[i], 31));
        se[i] = c.std_error->back();
        ASSERT_GT(se[i], 0.0);
    }
    EXPECT_NEAR(se[0] / se[1], 2.0, 0.4);
    EXPECT_NEAR(se[1] / se[2], 2.0, 0.4);
}

TEST(Ensemble, bootstrap_interval_brackets_the_estimate) {
    SystemParams s{1.0, 1.0, 0.9};
    auto run = run_ensemble(s, PulseParams{0.05, 0.02, 0.5, 0.02, 0.01, 0.5}, sim_for(10.0, 0.01, 60, 3));
    const auto w = FidelityWeights::haar_average();
    auto t = threshold_time(run.mean(w), 0.95);
    ASSERT_TRUE(t.crossed);
    auto [lo, hi] = run.bootstrap_threshold_ci(w, 0.95, 200);
    EXPECT_LE(lo, t.time);
    EXPECT_GE(hi, t.time);
    EXPECT_LT(lo, hi);
    // Reproducible from the master seed.
    EXPECT_EQ(run.bootstrap_threshold_ci(w, 0.95, 200), std::make_pair(lo, hi));
}

TEST(Ensemble, one_run_serves_every_initial_state) {
    SystemParams s{1.0, 1.0, 0.3};
    auto sim = sim_for(2.0, 0.1, 4, 8);
    auto run = run_ensemble(s, kNoisy, sim);
    auto direct = fidelity_pure(integrate(generate_random(kNoisy, 2.0, RandomStream(8, 2)), s, sim),
                                InitialState::from_population(0.3));
    auto v = run.sample_curve(2, FidelityWeights::pure(0.3));
    for (std::size_t k = 0; k < v.size(); ++k) EXPECT_NEAR(v[k], direct.values[k], 1e-15);
}

TEST(CurveCsv, schema) {
    FidelityCurve c;
    c.grid = {0.0, 0.5};
    c.values = {1.0, 1.0 / 3.0};
    auto text = curve_to_csv(c);
    EXPECT_EQ(text, "t,fidelity,stderr\n0,1,0\n0.5,0.333333333333,0\n");
}
