// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "scanforge/types.hpp"

namespace scanforge {

/// Spherical projection of a scan: H x W pixels, each holding the x, y, z,
/// intensity and range of the nearest point that mapped there. Row 0 is the
/// fov_up edge.
struct RangeImage {
    std::size_t width = 0;
    std::size_t height = 0;
    double fov_up = 0.0;    // radians
    double fov_down = 0.0;  // radians

    struct Pixel {
        float x = 0.f, y = 0.f, z = 0.f, intensity = 0.f, range = 0.f;
    };
    std::vector<Pixel> pixels;       // row-major
    std::vector<std::uint8_t> mask;  // 1 = valid

    const Pixel& at(std::size_t row, std::size_t col) const {
        return pixels[row * width + col];
    }
    bool valid(std::size_t row, std::size_t col) const {
        return mask[row * width + col] != 0;
    }
};

/// u = (1/2)(1 - atan2(y,x)/pi) W, v = (1 - (asin(z/r) - fov_down)/fov) H,
/// floored and clamped to bounds; when several points land on one pixel the
/// nearest wins (ties to the lowest point index). Zero-range points are
/// skipped. Throws DegenerateFov unless fov_up > fov_down, EmptyCloud on an
/// empty input.
RangeImage range_project(const PointCloud& cloud, std::size_t width,
                         std::size_t height, double fov_up, double fov_down);

/// How the radial coordinate of the polar transforms is computed. The
/// written-form equations use the full 3-D norm; Planar uses sqrt(x^2+y^2).
enum class RadiusMode { FullNorm, Planar };

struct PolarBounds {
    double radius_min = 3.0;
    double radius_max = 50.0;
    double z_min = -3.0;
    double z_max = 1.5;
};

/// Top-down polar grid: points are cropped to `bounds`, transformed to
/// (u, v) = (r cos(phi), r sin(phi)) and linearly discretized over
/// [-radius_max, radius_max]^2 into rows x cols cells.
struct BevImage {
    std::size_t rows = 0;  // u axis
    std::size_t cols = 0;  // v axis
    std::vector<std::uint32_t> counts;     // row-major
    std::vector<float> mean_intensity;     // 0 where count == 0
    std::size_t dropped = 0;               // points outside the crop

    std::uint32_t count(std::size_t r, std::size_t c) const {
        return counts[r * cols + c];
    }
};

BevImage polar_project(const PointCloud& cloud, std::size_t rows,
                       std::size_t cols, const PolarBounds& bounds = {},
                       RadiusMode radius_mode = RadiusMode::FullNorm);

struct VoxelCell {
    std::array<std::int32_t, 3> key{};
    std::uint32_t count = 0;
    std::array<double, 3> mean{};  // mean of the binning coordinates

    bool operator==(const VoxelCell&) const = default;
};

/// Sparse voxel map; cells sorted by key, only non-empty cells stored.
struct VoxelGrid {
    std::vector<VoxelCell> cells;

    bool operator==(const VoxelGrid&) const = default;
};

struct VoxelizeOptions {
    enum class Mode { Grid, Cylinder };
    Mode mode = Mode::Grid;

    // Grid mode: points are shifted to their centroid, scaled into [0,1]^3
    // (unit sphere mapped linearly onto the cube) unless `normalize` is
    // off, then floor-divided by `voxel_size[0]` on every axis.
    bool normalize = true;

    // Cylinder mode: coordinates are (r, phi, z) with per-axis sizes;
    // defaults 0.05 m, 0.001*pi rad, 0.05 m.
    std::array<double, 3> voxel_size{0.05, 0.001 * 3.14159265358979323846, 0.05};
    RadiusMode radius_mode = RadiusMode::FullNorm;
};

/// Voxelizes a cloud. Cell means are accumulated over members in ascending
/// coordinate order, which makes the result bit-exact under any permutation
/// of the input and any thread count. Throws EmptyCloud.
VoxelGrid voxelize(const PointCloud& cloud, const VoxelizeOptions& options);

enum class ImageChannel { Range, Intensity };

/// Writes a binary PGM (P5, maxval 255), min-max normalized over valid
/// pixels; invalid pixels are black.
void render_range_image(const RangeImage& image, ImageChannel channel,
                        const std::filesystem::path& path);

/// Same normalization for a BEV count grid (inspect tooling).
void render_bev_counts(const BevImage& image,
                       const std::filesystem::path& path);

}  // namespace scanforge
