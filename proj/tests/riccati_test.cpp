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

#include "randdd/riccati.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "randdd/oracle.hpp"

using namespace randdd;

namespace {

PulseSchedule no_pulses(double horizon) {
    PulseSchedule s;
    s.horizon = horizon;
    return s;
}

SimConfig sim_for(double t_max, double step = 1e-4, double grid_dt = 0.01) {
    SimConfig c;
    c.t_max = t_max;
    c.step = step;
    c.grid_dt = grid_dt;
    return c;
}

// Newton iteration on the stationary equation, started from Gamma/2.
complex newton_fixed_point(const SystemParams& s, complex q) {
    for (int i = 0; i < 100; ++i) {
        complex f = q_derivative(q, 0.0, s);
        complex df = complex(-s.gamma, s.omega) + 2.0 * q;
        q -= f / df;
    }
    return q;
}

}  // namespace

TEST(QDerivative, examples) {
    EXPECT_EQ(q_derivative(0.0, 0.0, {1.0, 1.0, 0.2}), complex(0.1, 0.0));
    EXPECT_EQ(q_derivative(0.0, 25.0, {1.0, 1.0, 0.2}), complex(0.1, 0.0));
    // 10 + (-20 + i) 0.5 + 0.25
    auto d = q_derivative(0.5, 0.0, {1.0, 1.0, 20.0});
    EXPECT_NEAR(d.real(), 0.25, 1e-15);
    EXPECT_NEAR(d.imag(), 0.5, 1e-15);
}

TEST(QDerivative, matches_derivative_of_closed_form) {
    for (double gamma : {0.2, 0.5, 0.9}) {
        SystemParams s{1.0, 1.0, gamma};
        ClosedFormNoControl cf(s);
        for (double t : {0.1, 0.7, 1.42, 3.0, 6.5}) {
            const double h = 1e-5;
            complex fd = (cf.q(t + h) - cf.q(t - h)) / (2.0 * h);
            EXPECT_LT(std::abs(q_derivative(cf.q(t), 0.0, s) - fd), 1e-9) << gamma << " " << t;
        }
    }
}

TEST(MarkovFixedPoint, is_stationary_and_tends_to_half_gamma) {
    for (double gamma : {0.2, 0.5, 0.9, 20.0, 1e3}) {
        SystemParams s{1.0, 1.0, gamma};
        complex q = markov_fixed_point(s);
        EXPECT_LT(std::abs(q_derivative(q, 0.0, s)), 1e-12 * std::max(1.0, gamma)) << gamma;
    }
    // Same root as Newton's method started at Gamma/2 in the Markov regime.
    SystemParams s20{1.0, 1.0, 20.0};
    EXPECT_LT(std::abs(markov_fixed_point(s20) - newton_fixed_point(s20, 0.5)), 1e-13);

    SystemParams big{1.0, 1.0, 1e6};
    EXPECT_LT(std::abs(markov_fixed_point(big) - 0.5), 10.0 / big.gamma);
    EXPECT_GT(markov_fixed_point({1.0, 1.0, 0.5}).real(), 0.0);
}

TEST(MarkovFixedPoint, degenerate_discriminant_throws) {
    // omega = 0, gamma = 2 Gamma makes gamma~^2 = 2 Gamma gamma.
    EXPECT_THROW(markov_fixed_point({0.0, 1.0, 2.0}), NumericalError);
}

TEST(Integrate, starts_at_zero) {
    auto tr = integrate(generate_regular({0.02, 0.008, 0.2}, 1.0), {1.0, 1.0, 0.3}, sim_for(1.0));
    EXPECT_EQ(tr.grid.front(), 0.0);
    EXPECT_EQ(tr.states.front(), QState{});
    EXPECT_EQ(tr.grid.size(), 101u);
}

TEST(Integrate, no_control_matches_closed_form) {
    SystemParams s{1.0, 1.0, 0.2};
    auto tr = integrate(no_pulses(10.0), s, sim_for(10.0));
    ClosedFormNoControl cf(s);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.grid.size(); ++k) {
        worst = std::max(worst, std::abs(std::exp(-tr.states[k].j) - cf.barQ(tr.grid[k])));
    }
    EXPECT_LT(worst, 1e-8);
}

TEST(Integrate, markov_regime_settles_to_half_gamma) {
    // At gamma = 20 the stationary value is Gamma/2 (1 + O(Gamma/gamma)) = 0.5117.
    SystemParams s{1.0, 1.0, 20.0};
    auto tr = integrate(no_pulses(3.0), s, sim_for(3.0));
    EXPECT_LT(std::abs(tr.states.back().q - markov_fixed_point(s)), 1e-9);
    EXPECT_NEAR(tr.states.back().q.real(), 0.5, 0.025 * 0.5);

    SystemParams s100{1.0, 1.0, 100.0};
    auto tr100 = integrate(no_pulses(1.0), s100, sim_for(1.0));
    EXPECT_NEAR(tr100.states.back().q.real(), 0.5, 0.01 * 0.5);
}

TEST(Integrate, fourth_order_convergence) {
    // A fast precession (omega = 200) keeps the truncation error well above
    // rounding across the ladder; at omega = 1 it is already at 1e-15 for h = 4e-4.
    SystemParams s{200.0, 1.0, 1.0};
    const double t_max = 2.0;
    const complex exact = closed_form_barQ(s, t_max);
    double err[3];
    const double steps[3] = {4e-4, 2e-4, 1e-4};
    for (int i = 0; i < 3; ++i) {
        auto tr = integrate(no_pulses(t_max), s, sim_for(t_max, steps[i], 0.1));
        err[i] = std::abs(std::exp(-tr.states.back().j) - exact);
    }
    EXPECT_GT(err[0] / err[1], 12.0);
    EXPECT_LT(err[0] / err[1], 20.0);
    EXPECT_GT(err[1] / err[2], 12.0);
    EXPECT_LT(err[1] / err[2], 20.0);
}

TEST(Integrate, running_integral_matches_quadrature_of_q) {
    SystemParams s{1.0, 1.0, 0.3};
    auto sched = generate_random({0.02, 0.008, 0.2, 0.004, 0.004, 0.0}, 2.0, RandomStream(1, 0));
    // Sample at every 1e-4 node and integrate Q with the trapezoid rule on [0.5, 1.5].
    auto tr = integrate(sched, s, sim_for(2.0, 1e-4, 1e-4));
    const std::size_t a = 5000, b = 15000;
    complex acc = 0.0;
    for (std::size_t k = a; k < b; ++k) {
        acc += 0.5 * (tr.states[k].q + tr.states[k + 1].q) * (tr.grid[k + 1] - tr.grid[k]);
    }
    // The trapezoid error is O(h^2 |Q''|) per unit time; Q'' is large only inside pulses.
    EXPECT_LT(std::abs((tr.states[b].j - tr.states[a].j) - acc), 1e-6);
}

TEST(Integrate, coherence_factor_stays_contractive) {
    const PulseParams pulses[] = {{0.02, 0.008, 0.2}, {0.02, 0.008, 0.2, 0.004, 0.004, 0.2}, {0.05, 0.03, 1.0}};
    for (double gamma : {0.2, 0.5, 0.9, 20.0}) {
        for (const auto& p : pulses) {
            auto sched = generate_random(p, 5.0, RandomStream(9, 0));
            auto tr = integrate(sched, {1.0, 1.0, gamma}, sim_for(5.0));
            for (const auto& st : tr.states) ASSERT_LE(std::abs(std::exp(-st.j)), 1.0 + 1e-9);
        }
        auto free = integrate(no_pulses(10.0), {1.0, 1.0, gamma}, sim_for(10.0));
        for (const auto& st : free.states) ASSERT_LE(std::abs(std::exp(-st.j)), 1.0 + 1e-9);
    }
}

TEST(Integrate, main_trajectory_is_independent_of_requested_grid) {
    auto sched = generate_regular({0.02, 0.008, 0.2}, 1.0);
    SystemParams s{1.0, 1.0, 0.3};
    auto coarse = integrate(sched, s, sim_for(1.0, 1e-4, 0.02));
    auto fine = integrate(sched, s, sim_for(1.0, 1e-4, 0.004));
    for (std::size_t k = 0; k < coarse.grid.size(); ++k) {
        // grid point 5k of the fine run is grid point k of the coarse run
        ASSERT_EQ(coarse.states[k], fine.states[5 * k]) << k;
    }
    // Off-node samples (0.0045 falls between nodes) do not perturb the nodes:
    // 40 * 0.0045 = 9 * 0.02.
    auto odd = integrate(sched, s, sim_for(1.0, 1e-4, 0.0045));
    for (std::size_t j = 0; 40 * j < odd.grid.size(); ++j) {
        ASSERT_EQ(odd.states[40 * j], coarse.states[9 * j]) << j;
    }
}

TEST(Integrate, blow_up_is_reported) {
    IntegrateOptions opt;
    opt.blowup_bound = 1e-3;
    EXPECT_THROW(integrate(no_pulses(1.0), {1.0, 1.0, 0.5}, sim_for(1.0), opt), NumericalError);
}

TEST(Integrate, short_schedule_is_rejected) {
    EXPECT_THROW(integrate(no_pulses(0.5), {1.0, 1.0, 0.5}, sim_for(1.0)), Error);
}

TEST(TrajectoryCsv, header_and_rows) {
    auto tr = integrate(no_pulses(0.02), {1.0, 1.0, 0.5}, sim_for(0.02, 1e-4, 0.01));
    auto text = trajectory_to_csv(tr);
    EXPECT_EQ(text.substr(0, text.find('\n')), "t,re_q,im_q,re_j,im_j");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}
