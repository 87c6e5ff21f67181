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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "randdd/model.hpp"
#include "randdd/pulsegen.hpp"
#include "randdd/stepping.hpp"

namespace randdd {

/// Exact no-control solution.
///
/// With Qbar = exp(-J), the Riccati equation at c = 0 linearizes to
///     Qbar'' + gt Qbar' + (Gamma gamma / 2) Qbar = 0,  Qbar(0) = 1, Qbar'(0) = 0,
/// where gt = gamma - i omega, so
///     Qbar(t) = (l2 e^{l1 t} - l1 e^{l2 t}) / (l2 - l1)
/// with l1, l2 the roots of l^2 + gt l + Gamma gamma / 2 = 0.
///
/// Note: writing this as a single damped cosine gives the envelope
/// e^{-gt t / 2} and the amplitude 1/sqrt(1 - gt^2 / (2 Gamma gamma)). The
/// variant with envelope e^{-gt t} and amplitude sqrt(1 - gt^2 / (2 Gamma gamma))
/// does not satisfy the Riccati equation and is not used.
struct ClosedFormNoControl {
    complex lambda1;
    complex lambda2;

    explicit ClosedFormNoControl(const SystemParams& s) {
        const complex gt(s.gamma, -s.omega);
        const complex root = std::sqrt(gt * gt - 2.0 * s.Gamma * s.gamma);
        lambda1 = 0.5 * (-gt + root);
        lambda2 = 0.5 * (-gt - root);
    }

    bool degenerate() const { return std::abs(lambda1 - lambda2) <= 1e-12 * std::max(1.0, std::abs(lambda1)); }

    complex barQ(double t) const {
        if (degenerate()) {
            const complex l = 0.5 * (lambda1 + lambda2);
            return (1.0 - l * t) * std::exp(l * t);
        }
        return (lambda2 * std::exp(lambda1 * t) - lambda1 * std::exp(lambda2 * t)) / (lambda2 - lambda1);
    }

    /// Q = -Qbar'/Qbar.
    complex q(double t) const {
        if (degenerate()) {
            const complex l = 0.5 * (lambda1 + lambda2);
            return l * l * t / (1.0 - l * t);
        }
        const complex e1 = std::exp(lambda1 * t), e2 = std::exp(lambda2 * t);
        const complex d = lambda1 * lambda2 * (e1 - e2) / (lambda2 - lambda1);
        return -d / barQ(t);
    }
};

inline complex closed_form_barQ(const SystemParams& s, double t) { return ClosedFormNoControl(s).barQ(t); }

// ---------------------------------------------------------------------------
// Pseudomode master equation.
//
// The OU bath is reproduced exactly by one damped bosonic mode at zero
// frequency: coupling lambda = sqrt(Gamma gamma / 2) via lambda (s- a+ + s+ a),
// Lindblad damping rate kappa = 2 gamma on a. Its free correlation
// lambda^2 e^{-kappa |t-s| / 2} equals the bath correlation. The Hamiltonian
// conserves excitation number and the jump lowers it, so with the mode
// starting in vacuum n_max = 1 is already exact.
// ---------------------------------------------------------------------------

inline constexpr int kMaxPseudomodeDim = 8;  // n_max <= 3

using PseudomodeMatrix =
    Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxPseudomodeDim, kMaxPseudomodeDim>;

struct PseudomodeState {
    PseudomodeMatrix rho;
};

struct PseudomodeOptions {
    int n_max = 1;
    double trace_tol = 1e-9;
    double hermiticity_tol = 1e-10;
    double positivity_tol = 1e-9;
};

/// Basis index of |q> (x) |n>, q = 1 being the excited qubit level.
inline int pm_index(int q, int n, int n_max) { return q * (n_max + 1) + n; }

/// Reduced qubit density matrix elements.
struct QubitReduced {
    double rho11 = 0.0;  // excited population
    complex rho10{};     // <1| rho |0>
};

inline QubitReduced reduce_qubit(const PseudomodeMatrix& rho, int n_max) {
    QubitReduced r;
    for (int n = 0; n <= n_max; ++n) {
        r.rho11 += rho(pm_index(1, n, n_max), pm_index(1, n, n_max)).real();
        r.rho10 += rho(pm_index(1, n, n_max), pm_index(0, n, n_max));
    }
    return r;
}

namespace detail {

struct PseudomodeOperators {
    PseudomodeMatrix h0;  // (omega/2) sz + lambda (s- a+ + s+ a)
    PseudomodeMatrix hc;  // sz / 2, multiplied by c(t)
    PseudomodeMatrix a;
    PseudomodeMatrix ad_a;
    double kappa;
};

inline PseudomodeOperators build_operators(const SystemParams& s, int n_max) {
    const int d = 2 * (n_max + 1);
    PseudomodeOperators ops;
    ops.h0 = PseudomodeMatrix::Zero(d, d);
    ops.hc = PseudomodeMatrix::Zero(d, d);
    ops.a = PseudomodeMatrix::Zero(d, d);
    const double lambda = std::sqrt(0.5 * s.Gamma * s.gamma);
    for (int q = 0; q <= 1; ++q) {
        for (int n = 0; n <= n_max; ++n) {
            const int i = pm_index(q, n, n_max);
            const double sz = q == 1 ? 1.0 : -1.0;
            ops.hc(i, i) = 0.5 * sz;
            ops.h0(i, i) = 0.5 * s.omega * sz;
            if (n >= 1) ops.a(pm_index(q, n - 1, n_max), i) = std::sqrt(static_cast<double>(n));
        }
    }
    // s- a+ : |1, n> -> sqrt(n+1) |0, n+1>
    for (int n = 0; n < n_max; ++n) {
        const double amp = lambda * std::sqrt(static_cast<double>(n + 1));
        ops.h0(pm_index(0, n + 1, n_max), pm_index(1, n, n_max)) += amp;
        ops.h0(pm_index(1, n, n_max), pm_index(0, n + 1, n_max)) += amp;
    }
    ops.ad_a = ops.a.adjoint() * ops.a;
    ops.kappa = 2.0 * s.gamma;
    return ops;
}

inline void check_physical(const PseudomodeMatrix& rho, double t, const PseudomodeOptions& opt) {
    const complex tr = rho.trace();
    if (!(std::abs(tr - 1.0) <= opt.trace_tol)) {
        throw NumericalError("pseudomode integration-quality: |Tr rho - 1| = " + std::to_string(std::abs(tr - 1.0)) +
                             " at t = " + std::to_string(t));
    }
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm <= opt.hermiticity_tol)) {
        throw NumericalError("pseudomode integration-quality: hermiticity defect " + std::to_string(herm) +
                             " at t = " + std::to_string(t));
    }
    Eigen::SelfAdjointEigenSolver<PseudomodeMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (!(min_eig >= -opt.positivity_tol)) {
        throw NumericalError("pseudomode integration-quality: eigenvalue " + std::to_string(min_eig) +
                             " at t = " + std::to_string(t));
    }
}

}  // namespace detail

/// Lindblad evolution of qubit (x) pseudomode from (mu|1> + nu|0>) (x) |0>,
/// sampled on the grid 0, grid_dt, ... with the same edge-aligned RK4 scheme
/// as the Riccati integrator. States are in the lab frame.
inline std::vector<PseudomodeState> pseudomode_evolve(const PulseSchedule& schedule, const SystemParams& system,
                                                      const InitialState& init, const SimConfig& sim,
                                                      const PseudomodeOptions& opt = {}) {
    if (opt.n_max < 1 || 2 * (opt.n_max + 1) > kMaxPseudomodeDim) {
        throw std::invalid_argument("pseudomode_evolve: n_max must be in [1, 3]");
    }
    const int n_max = opt.n_max;
    const int d = 2 * (n_max + 1);
    const auto ops = detail::build_operators(system, n_max);

    Eigen::Matrix<complex, Eigen::Dynamic, 1, 0, kMaxPseudomodeDim, 1> psi =
        Eigen::Matrix<complex, Eigen::Dynamic, 1, 0, kMaxPseudomodeDim, 1>::Zero(d);
    const InitialState s0 = normalized(init);
    psi(pm_index(1, 0, n_max)) = s0.mu;
    psi(pm_index(0, 0, n_max)) = s0.nu;
    PseudomodeMatrix rho0 = psi * psi.adjoint();

    const auto grid = make_grid(sim.t_max, sim.grid_dt);
    std::vector<PseudomodeState> out(grid.size());
    const auto edges = clip_edges(segment_edges(schedule), sim.t_max);
    const complex I(0.0, 1.0);

    auto make_stepper = [&](double a, double b) {
        const double c = field_at(schedule, 0.5 * (a + b));
        PseudomodeMatrix h = ops.h0 + c * ops.hc;
        return [h, &ops, I](const PseudomodeMatrix& rho, double step) {
            auto rhs = [&](const PseudomodeMatrix& r) -> PseudomodeMatrix {
                PseudomodeMatrix hr = h * r;
                PseudomodeMatrix anti = ops.ad_a * r;
                PseudomodeMatrix out = -I * (hr - hr.adjoint());
                out += ops.kappa * (ops.a * r * ops.a.adjoint() - 0.5 * (anti + anti.adjoint()));
                return out;
            };
            return rk4_step(rhs, rho, step);
        };
    };
    auto observe = [&](std::size_t k, const PseudomodeMatrix& r) {
        detail::check_physical(r, grid[k], opt);
        out[k].rho = r;
    };
    auto check = [](double, const PseudomodeMatrix&) {};
    march_segments(std::span<const double>(edges), std::span<const double>(grid), sim.step, rho0, make_stepper,
                   observe, check);
    return out;
}

/// Deviations between the QSD pipeline and the pseudomode solution.
struct FrameComparison {
    double max_pop_dev = 0.0;       // |rho11_pm - |mu|^2 |e^{-J}|^2|
    double max_cohmod_dev = 0.0;    // ||rho10_pm| - |mu nu* e^{-J}||
    double max_cohphase_dev = 0.0;  // |rho10_pm e^{+i int (omega + c)} - mu nu* e^{-J}|
};

/// Compares coherences on aligned grids. The pseudomode coherence is brought
/// into the frame co-rotating with omega + c(t) before the phase comparison.
inline FrameComparison compare_frames(std::span<const double> grid, std::span<const complex> qsd_rho10,
                                      std::span<const complex> pm_rho10, const PulseSchedule& schedule,
                                      const SystemParams& system) {
    if (qsd_rho10.size() != grid.size() || pm_rho10.size() != grid.size()) {
        throw std::invalid_argument("compare_frames: series are not aligned with the grid");
    }
    FrameComparison r;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double phase = system.omega * grid[k] + field_integral(schedule, grid[k]);
        const complex derotated = pm_rho10[k] * std::polar(1.0, phase);
        r.max_cohmod_dev = std::max(r.max_cohmod_dev, std::abs(std::abs(pm_rho10[k]) - std::abs(qsd_rho10[k])));
        r.max_cohphase_dev = std::max(r.max_cohphase_dev, std::abs(derotated - qsd_rho10[k]));
    }
    return r;
}

}  // namespace randdd
