// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "scanforge/types.hpp"

namespace scanforge {

/// Global-outlier injection. Benchmark ratios: 0.001 / 0.05 / 0.5
/// (0.1%, 5%, 50% extra points).
struct OutlierParams {
    double ratio = 0.0;  // N^g / N
    std::uint64_t seed = 0;
};

/// Local jitter distortion. Benchmark sigmas: 0.05 / 0.1 / 0.2 m at a fixed
/// 20% fraction.
struct DistortionParams {
    double fraction = 0.2;
    double sigma = 0.1;  // per-axis Gaussian std, meters
    std::uint64_t seed = 0;
};

/// round-half-up of ratio*n; the rule used for both N^g and N^l.
std::size_t scaled_count(double ratio, std::size_t n);

/// Appends round(ratio*N) points drawn uniformly from the ball centered at
/// the sensor with radius equal to the clean cloud's max range; injected
/// intensities are uniform in [0,1]. Originals keep their order and are
/// tagged Original; injected points are tagged Injected. Deterministic in
/// seed, independent of thread count. Throws EmptyCloud when N = 0.
std::pair<PointCloud, ProvenanceSet> apply_global_outliers(
    const PointCloud& cloud, const OutlierParams& params);

/// Jitters exactly round(fraction*N) distinct points with i.i.d. N(0, sigma^2)
/// per-axis offsets (tag Displaced, even at sigma = 0); every other point is
/// untouched (tag Original). Intensities never change. Throws EmptyCloud
/// when N = 0.
std::pair<PointCloud, ProvenanceSet> apply_local_distortion(
    const PointCloud& cloud, const DistortionParams& params);

/// The distinct indices apply_local_distortion will displace, in ascending
/// order; exposed so tests can check the set-exclusion law directly.
std::vector<std::uint32_t> distortion_selection(std::size_t n,
                                                const DistortionParams& params);

}  // namespace scanforge
