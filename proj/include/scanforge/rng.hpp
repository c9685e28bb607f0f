// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace scanforge {

// All randomness in the library flows through this generator so corrupted
// outputs are byte-identical across platforms, standard libraries, and
// thread counts. Parallel kernels never share a stream: each point (or
// beam) draws from its own substream keyed by (seed, kernel tag, index).

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed; order of draws from one substream
/// never affects another.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag,
                               std::uint64_t index = 0) {
    return mix64(seed ^ mix64(tag) ^ mix64(mix64(index) + tag));
}

/// FNV-1a over bytes; used for the per-scan seed-derivation rule recorded
/// in run manifests.
inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// splitmix64 sequence; good enough statistically for corruption sampling
/// and fully portable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in (0, 1]; safe as a log() argument.
    double uniform_pos() { return 1.0 - uniform(); }

    /// Standard normal via Box-Muller (portable, unlike
    /// std::normal_distribution).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double mag = std::sqrt(-2.0 * std::log(u1));
        double ang = 2.0 * std::numbers::pi * u2;
        spare_ = mag * std::sin(ang);
        have_spare_ = true;
        return mag * std::cos(ang);
    }

    /// Mean-one log-normal: exp(sigma*Z - sigma^2/2).
    double lognormal_unit(double sigma) {
        return std::exp(sigma * normal() - 0.5 * sigma * sigma);
    }

    /// Poisson count via exponential inter-arrival times; O(mean) draws.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        std::uint64_t k = 0;
        double t = 0.0;
        while (true) {
            t += -std::log(uniform_pos());
            if (t > mean) break;
            ++k;
        }
        return k;
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Multiply-shift; bias is negligible for the n used here (<< 2^64).
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Kernel tags for substream derivation. Values are arbitrary but frozen:
// changing them changes every corrupted output byte.
namespace stream_tag {
inline constexpr std::uint64_t kFog = 0x464f4721;
inline constexpr std::uint64_t kSnowBeam = 0x534e4f57;
inline constexpr std::uint64_t kOutlier = 0x4f55544c;
inline constexpr std::uint64_t kDistortSelect = 0x44535345;
inline constexpr std::uint64_t kDistortOffset = 0x44534f46;
inline constexpr std::uint64_t kSynth = 0x53594e54;
inline constexpr std::uint64_t kCutmix = 0x43555458;
inline constexpr std::uint64_t kFogAlpha = 0x464f4741;
}  // namespace stream_tag

}  // namespace scanforge
