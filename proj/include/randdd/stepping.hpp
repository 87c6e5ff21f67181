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
#include <cstddef>
#include <span>
#include <vector>

#include "randdd/model.hpp"

namespace randdd {

/// Output times 0, dt, 2 dt, ... up to t_max (inclusive when t_max is a multiple of dt).
inline std::vector<double> make_grid(double t_max, double dt) {
    std::vector<double> g;
    auto n = static_cast<std::size_t>(std::floor(t_max / dt * (1.0 + 1e-12)));
    g.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) g.push_back(static_cast<double>(k) * dt);
    return g;
}

/// Number of equal steps of length <= max_step covering a segment.
inline std::size_t steps_for(double length, double max_step) {
    auto n = static_cast<std::size_t>(std::ceil(length / max_step * (1.0 - 1e-12)));
    return std::max<std::size_t>(n, 1);
}

/// Classical 4th-order Runge-Kutta step for an autonomous right-hand side.
template <typename State, typename Rhs>
State rk4_step(const Rhs& f, const State& y, double h) {
    State k1 = f(y);
    State k2 = f(State(y + (0.5 * h) * k1));
    State k3 = f(State(y + (0.5 * h) * k2));
    State k4 = f(State(y + h * k3));
    return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Marches `state` across consecutive segments [edges[i], edges[i+1]].
///
/// `make_stepper(a, b)` returns a callable `(const State&, double h) -> State`
/// valid on that segment (its coefficients are constant there). Each segment is
/// covered by equal steps no longer than `max_step`, so no step straddles an
/// edge. `observe(k, state)` is called once for every grid time grid[k]: at a
/// node the node state is reported; between nodes a separate partial step is
/// taken from the previous node, leaving the main trajectory untouched. The
/// main trajectory therefore does not depend on which grid is requested.
///
/// `check(t, state)` runs after every main step (blow-up detection).
template <typename State, typename MakeStepper, typename Observe, typename Check>
State march_segments(std::span<const double> edges, std::span<const double> grid, double max_step, State state,
                     MakeStepper&& make_stepper, Observe&& observe, Check&& check) {
    std::size_t gi = 0;
    const double t0 = edges.empty() ? 0.0 : edges.front();
    const double snap0 = 1e-12 * std::max(1.0, std::abs(t0));
    while (gi < grid.size() && grid[gi] <= t0 + snap0) observe(gi++, state);

    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double a = edges[e];
        const double b = edges[e + 1];
        if (!(b > a)) continue;
        const std::size_t n = steps_for(b - a, max_step);
        const double h = (b - a) / static_cast<double>(n);
        const double snap = 1e-9 * h;
        auto step = make_stepper(a, b);
        for (std::size_t k = 0; k < n; ++k) {
            const double ta = a + static_cast<double>(k) * h;
            const double tb = (k + 1 == n) ? b : a + static_cast<double>(k + 1) * h;
            while (gi < grid.size() && grid[gi] < tb - snap) {
                observe(gi, State(step(state, grid[gi] - ta)));
                ++gi;
            }
            state = step(state, tb - ta);
            check(tb, state);
            while (gi < grid.size() && grid[gi] <= tb + snap) observe(gi++, state);
        }
    }
    return state;
}

/// Edge list for an integration over [0, t_max]: schedule edges clipped to t_max.
inline std::vector<double> clip_edges(std::span<const double> edges, double t_max) {
    std::vector<double> out;
    out.reserve(edges.size() + 1);
    for (double e : edges) {
        if (e < t_max) out.push_back(e);
    }
    if (out.empty() || out.front() != 0.0) out.insert(out.begin(), 0.0);
    out.push_back(t_max);
    return out;
}

}  // namespace randdd
