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

#include <cmath>
#include <string>
#include <vector>

#include "randdd/csv.hpp"
#include "randdd/model.hpp"
#include "randdd/pulsegen.hpp"
#include "randdd/stepping.hpp"

namespace randdd {

/// Q(t) together with its running integral J(t).
struct QState {
    complex q{};
    complex j{};

    friend QState operator+(const QState& a, const QState& b) { return {a.q + b.q, a.j + b.j}; }
    friend QState operator*(double s, const QState& a) { return {s * a.q, s * a.j}; }
    bool operator==(const QState&) const = default;
};

struct QTrajectory {
    std::vector<double> grid;
    std::vector<QState> states;
};

/// Right-hand side of the Riccati equation for the dissipative qubit:
///     dQ/dt = Gamma gamma / 2 + (-gamma + i omega + i c) Q + Q^2.
inline complex q_derivative(complex q, double c, const SystemParams& s) {
    return 0.5 * s.Gamma * s.gamma + complex(-s.gamma, s.omega + c) * q + q * q;
}

/// Stationary root of the c = 0 equation, on the branch that tends to Gamma/2
/// as gamma grows (amplitude-damping rate 2 Re Q* -> Gamma).
inline complex markov_fixed_point(const SystemParams& s) {
    const complex gt(s.gamma, -s.omega);  // gamma - i omega
    const complex disc = gt * gt - 2.0 * s.Gamma * s.gamma;
    if (std::abs(disc) <= 1e-14 * std::norm(gt)) {
        throw NumericalError("markov_fixed_point: degenerate discriminant");
    }
    complex root = std::sqrt(disc);
    // Pick the square root aligned with gamma~ so Q* = (gamma~ - root)/2 is the small root.
    if ((root * std::conj(gt)).real() < 0) root = -root;
    return 0.5 * (gt - root);
}

struct IntegrateOptions {
    double blowup_bound = 1e6;
};

/// Integrates (Q, J) from Q(0) = J(0) = 0 over [0, sim.t_max] with
/// fixed-step RK4, restarting at every field discontinuity, and samples on
/// the grid 0, grid_dt, 2 grid_dt, ...
inline QTrajectory integrate(const PulseSchedule& schedule, const SystemParams& system, const SimConfig& sim,
                             const IntegrateOptions& opt = {}) {
    if (schedule.horizon < sim.t_max * (1.0 - 1e-12)) {
        throw Error("integrate: schedule horizon " + std::to_string(schedule.horizon) + " is shorter than t_max " +
                    std::to_string(sim.t_max));
    }
    QTrajectory out;
    out.grid = make_grid(sim.t_max, sim.grid_dt);
    out.states.resize(out.grid.size());

    const auto all_edges = segment_edges(schedule);
    const auto edges = clip_edges(all_edges, sim.t_max);
    const double drive = 0.5 * system.Gamma * system.gamma;

    auto make_stepper = [&](double a, double b) {
        const double c = field_at(schedule, 0.5 * (a + b));
        const complex lin(-system.gamma, system.omega + c);
        return [drive, lin](const QState& y, double h) {
            auto rhs = [&](const QState& x) { return QState{drive + lin * x.q + x.q * x.q, x.q}; };
            return rk4_step(rhs, y, h);
        };
    };
    auto observe = [&](std::size_t k, const QState& y) { out.states[k] = y; };
    auto check = [&](double t, const QState& y) {
        const double m = std::abs(y.q);
        if (!(m <= opt.blowup_bound)) {
            throw NumericalError("riccati blow-up: |Q| = " + std::to_string(m) + " at t = " + std::to_string(t));
        }
    };
    march_segments(std::span<const double>(edges), std::span<const double>(out.grid), sim.step, QState{},
                   make_stepper, observe, check);
    return out;
}

/// Trajectory dump with columns t, Re Q, Im Q, Re J, Im J.
inline std::string trajectory_to_csv(const QTrajectory& tr) {
    csv::Writer w({"t", "re_q", "im_q", "re_j", "im_j"});
    for (std::size_t k = 0; k < tr.grid.size(); ++k) {
        const QState& s = tr.states[k];
        w.cell(tr.grid[k]).cell(s.q.real()).cell(s.q.imag()).cell(s.j.real()).cell(s.j.imag());
        w.end_row();
    }
    return w.str();
}

}  // namespace randdd
