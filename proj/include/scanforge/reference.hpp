// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <utility>

#include "scanforge/noise.hpp"
#include "scanforge/repr.hpp"
#include "scanforge/weather.hpp"

namespace scanforge::ref {

// Serial reference drivers for the OpenMP kernels. Same per-point math,
// plain loops, no atomics. Tests assert byte-identical results against the
// parallel primaries; the benchmark target compares their throughput.

std::pair<PointCloud, ProvenanceSet> apply_fog(const PointCloud& cloud,
                                               const FogParams& params);

std::pair<PointCloud, ProvenanceSet> apply_snowfall(
    const PointCloud& cloud, std::span<const std::uint16_t> beam_ids,
    const SnowParams& params);

std::pair<PointCloud, ProvenanceSet> apply_global_outliers(
    const PointCloud& cloud, const OutlierParams& params);

std::pair<PointCloud, ProvenanceSet> apply_local_distortion(
    const PointCloud& cloud, const DistortionParams& params);

RangeImage range_project(const PointCloud& cloud, std::size_t width,
                         std::size_t height, double fov_up, double fov_down);

BevImage polar_project(const PointCloud& cloud, std::size_t rows,
                       std::size_t cols, const PolarBounds& bounds = {},
                       RadiusMode radius_mode = RadiusMode::FullNorm);

VoxelGrid voxelize(const PointCloud& cloud, const VoxelizeOptions& options);

}  // namespace scanforge::ref
