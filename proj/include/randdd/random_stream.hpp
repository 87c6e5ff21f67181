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
#include <cstdint>
#include <numbers>

namespace randdd {

/// SplitMix64 output function (Steele, Lea & Flood 2014). Bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based variate stream.
///
/// The k-th 64-bit word of stream (seed, index) is
///
///     key  = mix64(seed ^ mix64(index ^ 0xD1B54A32D192ED03))
///     word = mix64(key + (k + 1) * 0x9E3779B97F4A7C15)
///
/// so any word can be computed without generating its predecessors and the
/// output depends only on (seed, index, k). Doubles take the top 53 bits.
/// Nothing here depends on the platform's <random> implementation.
class RandomStream {
   public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
        : master_seed_(master_seed),
          stream_index_(stream_index),
          key_(mix64(master_seed ^ mix64(stream_index ^ 0xD1B54A32D192ED03ULL))) {}

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }
    std::uint64_t position() const noexcept { return counter_; }

    std::uint64_t word_at(std::uint64_t k) const noexcept { return mix64(key_ + (k + 1) * 0x9E3779B97F4A7C15ULL); }

    std::uint64_t next_u64() noexcept { return word_at(counter_++); }

    /// Uniform on [0, 1).
    double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on [-1, 1).
    double uniform_pm1() noexcept { return 2.0 * uniform01() - 1.0; }

    /// Uniform index in [0, n) by multiply-shift; bias is below 2^-32 for the n used here.
    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Standard normal by Box-Muller (one variate per call, the sine branch discarded).
    double normal() noexcept {
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

   private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Stream indices at and above this value are reserved for auxiliary draws
/// (bootstrap resampling, Haar sampling) so they never collide with the
/// per-sample schedule streams 0, 1, 2, ...
inline constexpr std::uint64_t kAuxiliaryStreamBase = 1ULL << 62;

}  // namespace randdd
