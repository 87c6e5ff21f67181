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
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "randdd/csv.hpp"
#include "randdd/model.hpp"

namespace randdd {

/// Malformed configuration or command line (exit code 2).
class UsageError : public Error {
   public:
    using Error::Error;
};

/// Every key accepted in a config file or by --set.
inline constexpr std::array<std::string_view, 21> kConfigKeys = {
    "system.omega",   "system.Gamma",    "system.gamma",   "pulses.tau",       "pulses.delta",
    "pulses.phi",     "pulses.d_tau",    "pulses.d_delta", "pulses.d_phi",     "sim.t_max",
    "sim.step",       "sim.grid_dt",     "sim.ensemble_n", "sim.master_seed",  "sim.threshold",
    "sim.bootstrap_n", "state.mu2",      "sweep.gammas",   "sweep.ratios",     "curves.ratios",
    "curves.gamma",
};

inline bool is_config_key(std::string_view k) {
    return std::find(kConfigKeys.begin(), kConfigKeys.end(), k) != kConfigKeys.end();
}

/// Flat key -> value map. Later assignments win.
class Settings {
   public:
    void set(const std::string& key, const std::string& value) {
        if (!is_config_key(key)) throw UsageError("unknown configuration key '" + key + "'");
        values_[key] = value;
    }

    bool has(std::string_view key) const { return values_.count(std::string(key)) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    void merge(const Settings& other) {
        for (const auto& [k, v] : other.values_) values_[k] = v;
    }

    double get_double(std::string_view key, double fallback) const {
        auto it = values_.find(std::string(key));
        if (it == values_.end()) return fallback;
        try {
            return csv::parse_double(it->second);
        } catch (const Error&) {
            throw UsageError("key '" + std::string(key) + "': not a number: '" + it->second + "'");
        }
    }

    std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const {
        auto it = values_.find(std::string(key));
        if (it == values_.end()) return fallback;
        std::uint64_t x = 0;
        const auto& s = it->second;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw UsageError("key '" + std::string(key) + "': not a non-negative integer: '" + s + "'");
        }
        return x;
    }

    std::vector<double> get_list(std::string_view key, std::vector<double> fallback) const {
        auto it = values_.find(std::string(key));
        if (it == values_.end()) return fallback;
        std::vector<double> out;
        for (auto cell : csv::split(it->second)) {
            try {
                out.push_back(csv::parse_double(cell));
            } catch (const Error&) {
                throw UsageError("key '" + std::string(key) + "': bad list entry '" + std::string(cell) + "'");
            }
        }
        return out;
    }

   private:
    std::map<std::string, std::string> values_;
};

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Parses "key = value" lines; '#' starts a comment.
inline Settings parse_settings(std::istream& in) {
    Settings s;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view v = line;
        if (auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
        v = trim(v);
        if (v.empty()) continue;
        auto eq = v.find('=');
        if (eq == std::string_view::npos) {
            throw UsageError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        s.set(std::string(trim(v.substr(0, eq))), std::string(trim(v.substr(eq + 1))));
    }
    return s;
}

inline Settings load_settings(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open config file '" + path + "'");
    return parse_settings(f);
}

/// Applies the system/pulses/sim keys on top of the given defaults.
inline Bundle apply_settings(const Settings& s, Bundle b) {
    b.system.omega = s.get_double("system.omega", b.system.omega);
    b.system.Gamma = s.get_double("system.Gamma", b.system.Gamma);
    b.system.gamma = s.get_double("system.gamma", b.system.gamma);
    b.pulses.tau = s.get_double("pulses.tau", b.pulses.tau);
    b.pulses.delta = s.get_double("pulses.delta", b.pulses.delta);
    b.pulses.phi = s.get_double("pulses.phi", b.pulses.phi);
    b.pulses.d_tau = s.get_double("pulses.d_tau", b.pulses.d_tau);
    b.pulses.d_delta = s.get_double("pulses.d_delta", b.pulses.d_delta);
    b.pulses.d_phi = s.get_double("pulses.d_phi", b.pulses.d_phi);
    b.sim.t_max = s.get_double("sim.t_max", b.sim.t_max);
    b.sim.step = s.get_double("sim.step", b.sim.step);
    b.sim.grid_dt = s.get_double("sim.grid_dt", b.sim.grid_dt);
    b.sim.ensemble_n = s.get_u64("sim.ensemble_n", b.sim.ensemble_n);
    b.sim.master_seed = s.get_u64("sim.master_seed", b.sim.master_seed);
    b.sim.threshold = s.get_double("sim.threshold", b.sim.threshold);
    if (s.has("state.mu2")) b.init = InitialState::from_population(s.get_double("state.mu2", 0.5));
    return b;
}

}  // namespace randdd
