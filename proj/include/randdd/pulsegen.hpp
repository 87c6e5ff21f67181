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
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "randdd/csv.hpp"
#include "randdd/model.hpp"
#include "randdd/random_stream.hpp"

namespace randdd {

/// One rectangular pulse: the field equals area / width on [start, start + width).
struct Pulse {
    double start = 0.0;
    double width = 0.0;
    double area = 0.0;

    double end() const { return start + width; }
    double strength() const { return area / width; }

    bool operator==(const Pulse&) const = default;
};

struct PulseSchedule {
    std::vector<Pulse> pulses;
    double horizon = 0.0;

    bool operator==(const PulseSchedule&) const = default;
};

namespace detail {

// Appends a pulse, cutting it at the horizon with the area prorated so the
// strength is unchanged.
inline void push_truncated(std::vector<Pulse>& out, double start, double width, double area, double horizon) {
    if (start + width > horizon) {
        double kept = horizon - start;
        area *= kept / width;
        width = kept;
    }
    out.push_back(Pulse{start, width, area});
}

}  // namespace detail

/// Pulses at i * tau with constant width and area, for every i with i * tau < horizon.
inline PulseSchedule generate_regular(const PulseParams& p, double horizon) {
    PulseSchedule s;
    s.horizon = std::max(horizon, 0.0);
    for (std::size_t i = 0;; ++i) {
        double start = static_cast<double>(i) * p.tau;
        if (!(start < horizon)) break;
        detail::push_truncated(s.pulses, start, p.delta, p.phi, horizon);
    }
    return s;
}

/// Randomized train: for pulse i three fresh variates u, v, w ~ U(-1, 1) give
/// width = delta + d_delta v, area = phi + d_phi w, and the start-to-start gap
/// to the next pulse tau + d_tau u. With every deviation zero the output is
/// bit-identical to generate_regular.
inline PulseSchedule generate_random(const PulseParams& p, double horizon, RandomStream stream) {
    PulseSchedule s;
    s.horizon = std::max(horizon, 0.0);
    // start_i = i * tau + d_tau * (u_0 + ... + u_{i-1}); keeping the two sums
    // apart makes the zero-deviation case reproduce i * tau exactly.
    double jitter = 0.0;
    for (std::size_t i = 0;; ++i) {
        double start = static_cast<double>(i) * p.tau + p.d_tau * jitter;
        if (!(start < horizon)) break;
        double u = stream.uniform_pm1();
        double v = stream.uniform_pm1();
        double w = stream.uniform_pm1();
        detail::push_truncated(s.pulses, start, p.delta + p.d_delta * v, p.phi + p.d_phi * w, horizon);
        jitter += u;
    }
    return s;
}

/// Control field c(t). Pulses are half-open, so c vanishes exactly at a pulse's end.
inline double field_at(const PulseSchedule& s, double t) {
    if (!(t >= 0.0 && t <= s.horizon)) {
        throw std::out_of_range("field_at: t = " + std::to_string(t) + " outside [0, " + std::to_string(s.horizon) +
                                "]");
    }
    auto it = std::upper_bound(s.pulses.begin(), s.pulses.end(), t,
                               [](double x, const Pulse& p) { return x < p.start; });
    if (it == s.pulses.begin()) return 0.0;
    const Pulse& p = *std::prev(it);
    return t < p.end() ? p.strength() : 0.0;
}

/// Integral of c(s) over [0, t].
inline double field_integral(const PulseSchedule& s, double t) {
    double acc = 0.0;
    for (const Pulse& p : s.pulses) {
        if (p.start >= t) break;
        double overlap = std::min(t, p.end()) - p.start;
        acc += overlap >= p.width ? p.area : p.strength() * overlap;
    }
    return acc;
}

/// All pulse on/off times plus 0 and the horizon, sorted and deduplicated.
/// The field is constant between consecutive edges.
inline std::vector<double> segment_edges(const PulseSchedule& s) {
    std::vector<double> e;
    e.reserve(2 * s.pulses.size() + 2);
    e.push_back(0.0);
    for (const Pulse& p : s.pulses) {
        e.push_back(p.start);
        e.push_back(std::min(p.end(), s.horizon));
    }
    e.push_back(s.horizon);
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
}

/// Smallest start-to-start gap and largest width; used to assert non-overlap.
struct ScheduleExtremes {
    double min_gap = INFINITY;
    double max_width = 0.0;
    bool overlapping = false;
};

inline ScheduleExtremes schedule_extremes(const PulseSchedule& s) {
    ScheduleExtremes x;
    for (std::size_t i = 0; i < s.pulses.size(); ++i) {
        x.max_width = std::max(x.max_width, s.pulses[i].width);
        if (i + 1 < s.pulses.size()) {
            x.min_gap = std::min(x.min_gap, s.pulses[i + 1].start - s.pulses[i].start);
            if (s.pulses[i].end() > s.pulses[i + 1].start) x.overlapping = true;
        }
    }
    return x;
}

// Schedule CSV: header "index,start,width,area" then one pulse per row.
// Numbers are written with 17 significant digits so a replayed schedule is
// bit-identical to the generated one. The horizon travels in a comment line.

inline std::string schedule_to_csv(const PulseSchedule& s) {
    std::string out = "# horizon=" + csv::format(s.horizon) + "\nindex,start,width,area\n";
    char buf[64];
    auto exact = [&](double x) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);  // shortest round-trip
        return std::string(buf, ptr);
    };
    for (std::size_t i = 0; i < s.pulses.size(); ++i) {
        const Pulse& p = s.pulses[i];
        out += std::to_string(i) + ',' + exact(p.start) + ',' + exact(p.width) + ',' + exact(p.area) + '\n';
    }
    return out;
}

/// Parses schedule CSV. A missing horizon comment defaults to the last pulse end.
inline PulseSchedule schedule_from_csv(std::istream& in) {
    PulseSchedule s;
    bool have_horizon = false;
    bool have_header = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto pos = line.find("horizon=");
            if (pos != std::string::npos) {
                s.horizon = csv::parse_double(std::string_view(line).substr(pos + 8));
                have_horizon = true;
            }
            continue;
        }
        if (!have_header) {
            if (line != "index,start,width,area") throw Error("schedule csv: unexpected header '" + line + "'");
            have_header = true;
            continue;
        }
        auto cells = csv::split(line);
        if (cells.size() != 4) throw Error("schedule csv: line " + std::to_string(lineno) + " needs 4 columns");
        Pulse p{csv::parse_double(cells[1]), csv::parse_double(cells[2]), csv::parse_double(cells[3])};
        if (!(p.width > 0) || !std::isfinite(p.strength())) {
            throw Error("schedule csv: line " + std::to_string(lineno) + " has non-positive width");
        }
        if (!s.pulses.empty() && s.pulses.back().end() > p.start) {
            throw Error("schedule csv: line " + std::to_string(lineno) + " overlaps the previous pulse");
        }
        s.pulses.push_back(p);
    }
    if (!have_header) throw Error("schedule csv: missing header");
    if (!have_horizon) s.horizon = s.pulses.empty() ? 0.0 : s.pulses.back().end();
    return s;
}

inline void save_schedule(const PulseSchedule& s, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << schedule_to_csv(s);
}

inline PulseSchedule load_schedule(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open '" + path + "'");
    return schedule_from_csv(f);
}

}  // namespace randdd
