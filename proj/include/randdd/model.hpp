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
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace randdd {

using complex = std::complex<double>;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Named invariant violations reported by validate().
enum class Violation {
    kOmegaNotPositive,
    kCouplingNotPositive,
    kMemoryRateNotPositive,
    kTauNotPositive,
    kDeltaNotPositive,
    kNegativeDeviation,
    kPulseOverlapPossible,
    kWidthNotPositive,
    kPeriodNotPositive,
    kNonFiniteParameter,
    kStepNotPositive,
    kGridOrder,
    kEnsembleEmpty,
    kThresholdRange,
    kStateNotNormalizable,
};

inline std::string_view violation_name(Violation v) {
    switch (v) {
        case Violation::kOmegaNotPositive:
            return "omega-not-positive";
        case Violation::kCouplingNotPositive:
            return "coupling-not-positive";
        case Violation::kMemoryRateNotPositive:
            return "memory-rate-not-positive";
        case Violation::kTauNotPositive:
            return "tau-not-positive";
        case Violation::kDeltaNotPositive:
            return "delta-not-positive";
        case Violation::kNegativeDeviation:
            return "negative-deviation";
        case Violation::kPulseOverlapPossible:
            return "pulse-overlap-possible";
        case Violation::kWidthNotPositive:
            return "width-not-positive";
        case Violation::kPeriodNotPositive:
            return "period-not-positive";
        case Violation::kNonFiniteParameter:
            return "non-finite-parameter";
        case Violation::kStepNotPositive:
            return "step-not-positive";
        case Violation::kGridOrder:
            return "grid-order";
        case Violation::kEnsembleEmpty:
            return "ensemble-empty";
        case Violation::kThresholdRange:
            return "threshold-range";
        case Violation::kStateNotNormalizable:
            return "state-not-normalizable";
    }
    return "unknown";
}

class ValidationError : public Error {
   public:
    ValidationError(Violation v, const std::string& detail)
        : Error(std::string(violation_name(v)) + ": " + detail), violation_(v) {}

    Violation violation() const noexcept { return violation_; }

   private:
    Violation violation_;
};

/// Raised when an integration diverges or loses physical consistency.
class NumericalError : public Error {
   public:
    using Error::Error;
};

/// Qubit splitting, coupling strength and bath memory rate. All times in the
/// library are measured in units of 1/omega.
struct SystemParams {
    double omega = 1.0;
    double Gamma = 1.0;
    double gamma = 0.5;

    bool operator==(const SystemParams&) const = default;
};

/// Initial pure state mu|1> + nu|0>, |1> being the excited level.
struct InitialState {
    complex mu{1.0, 0.0};
    complex nu{0.0, 0.0};

    double excited_population() const { return std::norm(mu); }

    /// Real amplitudes with the given excited-level population.
    static InitialState from_population(double p) {
        return InitialState{complex(std::sqrt(p), 0.0), complex(std::sqrt(1.0 - p), 0.0)};
    }

    bool operator==(const InitialState&) const = default;
};

/// Mean rectangular-pulse parameters and their uniform deviation scales.
struct PulseParams {
    double tau = 0.02;
    double delta = 0.008;
    double phi = 0.2;
    double d_tau = 0.0;
    double d_delta = 0.0;
    double d_phi = 0.0;

    bool is_regular() const { return d_tau == 0.0 && d_delta == 0.0 && d_phi == 0.0; }

    /// The same means with every deviation set to zero.
    PulseParams regular() const {
        PulseParams p = *this;
        p.d_tau = p.d_delta = p.d_phi = 0.0;
        return p;
    }

    bool operator==(const PulseParams&) const = default;
};

struct SimConfig {
    double t_max = 30.0;
    double step = 1e-4;
    double grid_dt = 0.01;
    std::size_t ensemble_n = 200;
    std::uint64_t master_seed = 20120101;
    double threshold = 0.95;

    bool operator==(const SimConfig&) const = default;
};

struct Bundle {
    SystemParams system;
    PulseParams pulses;
    SimConfig sim;
    std::optional<InitialState> init;
    /// Non-fatal diagnostics collected during validation.
    std::vector<std::string> warnings;
};

namespace detail {

inline void require(bool ok, Violation v, const std::string& detail) {
    if (!ok) throw ValidationError(v, detail);
}

inline void require_finite(double x, const char* name) {
    require(std::isfinite(x), Violation::kNonFiniteParameter, std::string(name) + " is not finite");
}

}  // namespace detail

inline void validate_system(const SystemParams& s) {
    using detail::require;
    detail::require_finite(s.omega, "omega");
    detail::require_finite(s.Gamma, "Gamma");
    detail::require_finite(s.gamma, "gamma");
    require(s.omega > 0, Violation::kOmegaNotPositive, "omega must be > 0");
    require(s.Gamma > 0, Violation::kCouplingNotPositive, "Gamma must be > 0");
    require(s.gamma > 0, Violation::kMemoryRateNotPositive, "gamma must be > 0");
}

inline void validate_pulses(const PulseParams& p) {
    using detail::require;
    for (auto [x, name] : {std::pair{p.tau, "tau"}, {p.delta, "delta"}, {p.phi, "phi"}, {p.d_tau, "d_tau"},
                           {p.d_delta, "d_delta"}, {p.d_phi, "d_phi"}}) {
        detail::require_finite(x, name);
    }
    require(p.tau > 0, Violation::kTauNotPositive, "tau must be > 0");
    require(p.delta > 0, Violation::kDeltaNotPositive, "delta must be > 0");
    require(p.d_tau >= 0 && p.d_delta >= 0 && p.d_phi >= 0, Violation::kNegativeDeviation,
            "deviation scales must be >= 0");
    require(p.d_delta < p.delta, Violation::kWidthNotPositive, "d_delta must be < delta");
    require(p.d_tau < p.tau, Violation::kPeriodNotPositive, "d_tau must be < tau");
    require(p.delta + p.d_delta < p.tau - p.d_tau, Violation::kPulseOverlapPossible,
            "delta + d_delta = " + std::to_string(p.delta + p.d_delta) +
                " must be < tau - d_tau = " + std::to_string(p.tau - p.d_tau));
}

inline void validate_sim(const SimConfig& s) {
    using detail::require;
    detail::require_finite(s.t_max, "t_max");
    detail::require_finite(s.step, "step");
    detail::require_finite(s.grid_dt, "grid_dt");
    require(s.step > 0, Violation::kStepNotPositive, "step must be > 0");
    require(s.t_max > 0 && s.grid_dt > 0 && s.step <= s.grid_dt && s.grid_dt <= s.t_max, Violation::kGridOrder,
            "need 0 < step <= grid_dt <= t_max");
    require(s.ensemble_n >= 1, Violation::kEnsembleEmpty, "ensemble_n must be >= 1");
    require(s.threshold > 0 && s.threshold < 1, Violation::kThresholdRange, "threshold must lie in (0, 1)");
}

/// Rescales (mu, nu) to unit norm.
inline InitialState normalized(const InitialState& s) {
    double n = std::sqrt(std::norm(s.mu) + std::norm(s.nu));
    detail::require(std::isfinite(n) && n > 0, Violation::kStateNotNormalizable, "initial state has zero norm");
    return InitialState{s.mu / n, s.nu / n};
}

/// Checks every invariant of the inputs. Returns the bundle with the initial
/// state normalized and warnings attached; throws ValidationError otherwise.
inline Bundle validate(Bundle b) {
    validate_system(b.system);
    validate_pulses(b.pulses);
    validate_sim(b.sim);
    if (b.init) {
        b.init = normalized(*b.init);
    }
    b.warnings.clear();
    if (b.pulses.d_phi > std::abs(b.pulses.phi)) {
        b.warnings.push_back("d_phi exceeds |phi|: realized pulse areas may change sign");
    }
    return b;
}

inline Bundle validate(const SystemParams& system, const PulseParams& pulses, const SimConfig& sim,
                       std::optional<InitialState> init = std::nullopt) {
    return validate(Bundle{system, pulses, sim, init, {}});
}

/// Ornstein-Uhlenbeck bath correlation (Gamma gamma / 2) exp(-gamma |t - s|).
inline complex bath_correlation(const SystemParams& s, double t, double u) {
    return {0.5 * s.Gamma * s.gamma * std::exp(-s.gamma * std::abs(t - u)), 0.0};
}

}  // namespace randdd
