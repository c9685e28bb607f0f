// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "scanforge/repr.hpp"

namespace scanforge::detail {

// Shared per-point projection math. The OpenMP kernels and the serial
// reference drivers both call these, so serial/parallel equality tests
// exercise only the scheduling and reduction logic.

/// Flat pixel index a point projects to, or nullopt for zero-range points.
std::optional<std::size_t> range_pixel_of(const Point& p, std::size_t width,
                                          std::size_t height, double fov_up,
                                          double fov_down);

/// Winner encoding for pixel conflicts: smaller packed value = nearer
/// point, ties broken by the lower point index.
inline std::uint64_t pack_range_winner(float range, std::uint32_t index) {
    std::uint32_t bits;
    static_assert(sizeof(bits) == sizeof(range));
    __builtin_memcpy(&bits, &range, 4);
    // Non-negative floats compare like their bit patterns.
    return (static_cast<std::uint64_t>(bits) << 32) | index;
}

double polar_radius(const Point& p, RadiusMode mode);

/// Flat cell index for the polar BEV, or nullopt when cropped away.
std::optional<std::size_t> polar_cell_of(const Point& p, std::size_t rows,
                                         std::size_t cols,
                                         const PolarBounds& bounds,
                                         RadiusMode mode);

/// Centroid and unit-sphere scale for grid-mode voxel normalization.
struct GridNorm {
    double cx = 0.0, cy = 0.0, cz = 0.0;
    double scale = 0.0;
    bool normalize = true;
};

GridNorm grid_norm(const PointCloud& cloud, bool normalize);

struct VoxelBinRecord {
    std::array<std::int32_t, 3> key;
    std::array<double, 3> coord;

    friend bool operator<(const VoxelBinRecord& a, const VoxelBinRecord& b) {
        if (a.key != b.key) return a.key < b.key;
        return a.coord < b.coord;
    }
};

VoxelBinRecord voxel_record_of(const Point& p, const VoxelizeOptions& options,
                               const GridNorm& norm);

/// Sorts records into canonical (key, coord) order and folds them into a
/// sparse grid; means accumulate in that order.
VoxelGrid reduce_voxel_records(std::vector<VoxelBinRecord>& records);

}  // namespace scanforge::detail
