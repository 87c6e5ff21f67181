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

#include "randdd/pulsegen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace randdd;

namespace {

const PulseParams kStandard{0.02, 0.008, 0.2, 0.0, 0.0, 0.0};
const PulseParams kNoisy{0.02, 0.008, 0.2, 0.004, 0.004, 0.1};

}  // namespace

TEST(GenerateRegular, five_pulses_in_a_tenth) {
    auto s = generate_regular(kStandard, 0.1);
    ASSERT_EQ(s.pulses.size(), 5u);
    const double starts[] = {0.0, 0.02, 0.04, 0.06, 0.08};
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_NEAR(s.pulses[i].start, starts[i], 1e-15);
        EXPECT_EQ(s.pulses[i].width, 0.008);
        EXPECT_EQ(s.pulses[i].area, 0.2);
        EXPECT_NEAR(s.pulses[i].strength(), 25.0, 1e-12);
    }
}

TEST(GenerateRegular, empty_and_boundary_horizons) {
    EXPECT_TRUE(generate_regular(kStandard, 0.0).pulses.empty());

    auto s = generate_regular(kStandard, 0.021);
    ASSERT_EQ(s.pulses.size(), 2u);
    EXPECT_EQ(s.pulses[1].start, 0.02);
    // The second pulse is cut at the horizon, keeping its strength.
    EXPECT_NEAR(s.pulses[1].width, 0.001, 1e-15);
    EXPECT_NEAR(s.pulses[1].strength(), 25.0, 1e-9);
}

TEST(GenerateRandom, zero_deviation_matches_regular_bit_for_bit) {
    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
        EXPECT_EQ(generate_random(kStandard, 7.3, RandomStream(seed, 5)), generate_regular(kStandard, 7.3));
    }
}

TEST(GenerateRandom, deterministic_per_stream) {
    auto a = generate_random(kNoisy, 3.0, RandomStream(11, 2));
    auto b = generate_random(kNoisy, 3.0, RandomStream(11, 2));
    auto c = generate_random(kNoisy, 3.0, RandomStream(11, 3));
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(GenerateRandom, sample_means_converge) {
    // ~1e4 pulses; each realized parameter is X + D U(-1,1), standard error D / sqrt(3N).
    auto s = generate_random(kNoisy, 200.0, RandomStream(2024, 0));
    const std::size_t n = s.pulses.size() - 1;  // last pulse may be truncated
    ASSERT_GT(n, 9000u);
    double gap = 0, width = 0, area = 0;
    for (std::size_t i = 0; i < n; ++i) {
        gap += s.pulses[i + 1].start - s.pulses[i].start;
        width += s.pulses[i].width;
        area += s.pulses[i].area;
    }
    gap /= n;
    width /= n;
    area /= n;
    const double se = 1.0 / std::sqrt(3.0 * n);
    EXPECT_NEAR(gap, 0.02, 3.0 * 0.004 * se);
    EXPECT_NEAR(width, 0.008, 4.0 * 0.004 * se);
    EXPECT_NEAR(area, 0.2, 4.0 * 0.1 * se);
}

TEST(GenerateRandom, never_overlaps) {
    for (std::uint64_t k = 0; k < 200; ++k) {
        auto s = generate_random(kNoisy, 5.0, RandomStream(77, k));
        auto x = schedule_extremes(s);
        EXPECT_FALSE(x.overlapping);
        EXPECT_GE(x.min_gap, kNoisy.tau - kNoisy.d_tau);
        EXPECT_LE(x.max_width, kNoisy.delta + kNoisy.d_delta);
        EXPECT_GT(x.min_gap, x.max_width);
        for (const auto& p : s.pulses) EXPECT_LE(p.end(), s.horizon);
    }
}

TEST(FieldAt, on_off_and_half_open_edge) {
    auto s = generate_regular(kStandard, 0.1);
    EXPECT_NEAR(field_at(s, 0.004), 25.0, 1e-12);
    EXPECT_EQ(field_at(s, 0.009), 0.0);
    EXPECT_EQ(field_at(s, s.pulses[0].end()), 0.0);
    EXPECT_NEAR(field_at(s, 0.0), 25.0, 1e-12);
    EXPECT_EQ(field_at(s, 0.1), 0.0);
    EXPECT_THROW(field_at(s, -1e-9), std::out_of_range);
    EXPECT_THROW(field_at(s, 0.1000001), std::out_of_range);
}

TEST(FieldAt, integrates_to_pulse_area) {
    auto s = generate_random(kNoisy, 1.0, RandomStream(5, 1));
    auto edges = segment_edges(s);
    for (const auto& p : s.pulses) {
        // Difference of two running sums: rounding scales with the cumulative value.
        const double upper = field_integral(s, p.end());
        EXPECT_NEAR(upper - field_integral(s, p.start), p.area, 4e-15 * std::max(1.0, std::abs(upper)));
        // Independent route: sum of field_at(midpoint) * length over the segments inside the pulse.
        double acc = 0.0;
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            if (edges[e] >= p.start && edges[e + 1] <= p.end()) {
                acc += field_at(s, 0.5 * (edges[e] + edges[e + 1])) * (edges[e + 1] - edges[e]);
            }
        }
        EXPECT_NEAR(acc, p.area, 1e-14 * std::max(1.0, std::abs(p.area)));
    }
}

TEST(SegmentEdges, regular_and_empty) {
    auto s = generate_regular(kStandard, 0.05);
    auto e = segment_edges(s);
    const double want[] = {0.0, 0.008, 0.02, 0.028, 0.04, 0.048, 0.05};
    ASSERT_EQ(e.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(e[i], want[i], 1e-15);

    PulseSchedule empty;
    empty.horizon = 1.0;
    EXPECT_EQ(segment_edges(empty), (std::vector<double>{0.0, 1.0}));
}

TEST(SegmentEdges, random_is_strictly_increasing_and_field_is_piecewise_constant) {
    for (std::uint64_t k = 0; k < 20; ++k) {
        auto s = generate_random(kNoisy, 2.0, RandomStream(3, k));
        auto e = segment_edges(s);
        EXPECT_EQ(e.front(), 0.0);
        EXPECT_EQ(e.back(), 2.0);
        for (std::size_t i = 0; i + 1 < e.size(); ++i) {
            ASSERT_LT(e[i], e[i + 1]);
            const double len = e[i + 1] - e[i];
            const double c = field_at(s, e[i] + 0.5 * len);
            EXPECT_EQ(field_at(s, e[i] + 0.01 * len), c);
            EXPECT_EQ(field_at(s, e[i] + 0.99 * len), c);
        }
    }
}

TEST(ScheduleCsv, replay_round_trips) {
    for (std::uint64_t k = 0; k < 5; ++k) {
        auto s = generate_random(kNoisy, 1.37, RandomStream(8, k));
        std::istringstream in(schedule_to_csv(s));
        EXPECT_EQ(schedule_from_csv(in), s);
    }
}

TEST(ScheduleCsv, rejects_bad_input) {
    std::istringstream bad_header("start,width\n");
    EXPECT_THROW(schedule_from_csv(bad_header), Error);
    std::istringstream overlap("index,start,width,area\n0,0,0.5,1\n1,0.4,0.1,1\n");
    EXPECT_THROW(schedule_from_csv(overlap), Error);
    std::istringstream zero_width("index,start,width,area\n0,0,0,1\n");
    EXPECT_THROW(schedule_from_csv(zero_width), Error);
    std::istringstream no_horizon("index,start,width,area\n0,0,0.5,1\n");
    EXPECT_EQ(schedule_from_csv(no_horizon).horizon, 0.5);
}
