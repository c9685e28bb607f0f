// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "scanforge/repr.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>

#include "scanforge/repr_detail.hpp"

namespace scanforge {

namespace detail {

std::optional<std::size_t> range_pixel_of(const Point& p, std::size_t width,
                                          std::size_t height, double fov_up,
                                          double fov_down) {
    const double r = p.range();
    if (r <= 0.0) return std::nullopt;
    const double fov = fov_up - fov_down;
    const double u = 0.5 * (1.0 - std::atan2(p.y, p.x) / std::numbers::pi) *
                     static_cast<double>(width);
    const double pitch =
        std::asin(std::clamp(static_cast<double>(p.z) / r, -1.0, 1.0));
    const double v =
        (1.0 - (pitch - fov_down) / fov) * static_cast<double>(height);
    const std::size_t col = static_cast<std::size_t>(
        std::clamp(std::floor(u), 0.0, static_cast<double>(width - 1)));
    const std::size_t row = static_cast<std::size_t>(
        std::clamp(std::floor(v), 0.0, static_cast<double>(height - 1)));
    return row * width + col;
}

double polar_radius(const Point& p, RadiusMode mode) {
    return mode == RadiusMode::FullNorm ? p.range() : p.range_xy();
}

std::optional<std::size_t> polar_cell_of(const Point& p, std::size_t rows,
                                         std::size_t cols,
                                         const PolarBounds& bounds,
                                         RadiusMode mode) {
    const double r = polar_radius(p, mode);
    if (r < bounds.radius_min || r > bounds.radius_max) return std::nullopt;
    if (p.z < bounds.z_min || p.z > bounds.z_max) return std::nullopt;
    const double phi = std::atan2(p.y, p.x);
    const double u = r * std::cos(phi);
    const double v = r * std::sin(phi);
    const double span = 2.0 * bounds.radius_max;
    const std::size_t row = static_cast<std::size_t>(std::clamp(
        std::floor((u + bounds.radius_max) / span * static_cast<double>(rows)),
        0.0, static_cast<double>(rows - 1)));
    const std::size_t col = static_cast<std::size_t>(std::clamp(
        std::floor((v + bounds.radius_max) / span * static_cast<double>(cols)),
        0.0, static_cast<double>(cols - 1)));
    return row * cols + col;
}

}  // namespace detail

RangeImage range_project(const PointCloud& cloud, std::size_t width,
                         std::size_t height, double fov_up, double fov_down) {
    if (!(fov_up > fov_down)) {
        throw Error(ErrorCode::DegenerateFov, "fov_up must exceed fov_down");
    }
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::DegenerateFov, "image must be at least 1x1");
    }
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "cannot project an empty cloud");
    }

    const std::size_t n_px = width * height;
    constexpr std::uint64_t kEmpty = std::numeric_limits<std::uint64_t>::max();
    auto winners = std::make_unique<std::atomic<std::uint64_t>[]>(n_px);
    for (std::size_t i = 0; i < n_px; ++i) {
        winners[i].store(kEmpty, std::memory_order_relaxed);
    }

#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(cloud.size());
         ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto px =
            detail::range_pixel_of(cloud[i], width, height, fov_up, fov_down);
        if (!px) continue;
        const std::uint64_t packed = detail::pack_range_winner(
            cloud[i].range(), static_cast<std::uint32_t>(i));
        std::uint64_t cur = winners[*px].load(std::memory_order_relaxed);
        while (packed < cur && !winners[*px].compare_exchange_weak(
                                   cur, packed, std::memory_order_relaxed)) {
        }
    }

    RangeImage img;
    img.width = width;
    img.height = height;
    img.fov_up = fov_up;
    img.fov_down = fov_down;
    img.pixels.resize(n_px);
    img.mask.assign(n_px, 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t pp = 0; pp < static_cast<std::int64_t>(n_px); ++pp) {
        const auto px = static_cast<std::size_t>(pp);
        const std::uint64_t w = winners[px].load(std::memory_order_relaxed);
        if (w == kEmpty) continue;
        const Point& p = cloud[static_cast<std::uint32_t>(w & 0xFFFFFFFFu)];
        img.pixels[px] = {p.x, p.y, p.z, p.intensity, p.range()};
        img.mask[px] = 1;
    }
    return img;
}

BevImage polar_project(const PointCloud& cloud, std::size_t rows,
                       std::size_t cols, const PolarBounds& bounds,
                       RadiusMode radius_mode) {
    if (rows < 1 || cols < 1 || !(bounds.radius_max > bounds.radius_min) ||
        !(bounds.z_max > bounds.z_min) || bounds.radius_max <= 0.0) {
        throw Error(ErrorCode::DegenerateBounds, "invalid BEV bounds");
    }

    const std::size_t n = cloud.size();
    constexpr std::size_t kDropped = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> cell(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto c =
            detail::polar_cell_of(cloud[i], rows, cols, bounds, radius_mode);
        cell[i] = c ? *c : kDropped;
    }

    BevImage img;
    img.rows = rows;
    img.cols = cols;
    img.counts.assign(rows * cols, 0);
    img.mean_intensity.assign(rows * cols, 0.f);

    // Accumulate in point-index order per cell so the result never depends
    // on thread count.
    std::vector<double> sums(rows * cols, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (cell[i] == kDropped) {
            ++img.dropped;
            continue;
        }
        ++img.counts[cell[i]];
        sums[cell[i]] += cloud[i].intensity;
    }
    for (std::size_t c = 0; c < rows * cols; ++c) {
        if (img.counts[c] > 0) {
            img.mean_intensity[c] =
                static_cast<float>(sums[c] / img.counts[c]);
        }
    }
    return img;
}

namespace detail {

GridNorm grid_norm(const PointCloud& cloud, bool normalize) {
    GridNorm norm;
    norm.normalize = normalize;
    if (!normalize || cloud.empty()) return norm;
    const auto n = static_cast<double>(cloud.size());
    for (const Point& p : cloud.points) {
        norm.cx += p.x;
        norm.cy += p.y;
        norm.cz += p.z;
    }
    norm.cx /= n;
    norm.cy /= n;
    norm.cz /= n;
    for (const Point& p : cloud.points) {
        const double dx = p.x - norm.cx, dy = p.y - norm.cy, dz = p.z - norm.cz;
        norm.scale = std::max(norm.scale, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    return norm;
}

VoxelBinRecord voxel_record_of(const Point& p, const VoxelizeOptions& options,
                               const GridNorm& norm) {
    VoxelBinRecord rec;
    if (options.mode == VoxelizeOptions::Mode::Grid) {
        if (norm.normalize) {
            if (norm.scale > 0.0) {
                rec.coord = {(p.x - norm.cx) / (2.0 * norm.scale) + 0.5,
                             (p.y - norm.cy) / (2.0 * norm.scale) + 0.5,
                             (p.z - norm.cz) / (2.0 * norm.scale) + 0.5};
            } else {
                rec.coord = {0.5, 0.5, 0.5};
            }
        } else {
            rec.coord = {p.x, p.y, p.z};
        }
        const double vs = options.voxel_size[0];
        for (int a = 0; a < 3; ++a) {
            rec.key[a] = static_cast<std::int32_t>(std::floor(rec.coord[a] / vs));
        }
    } else {
        rec.coord = {polar_radius(p, options.radius_mode),
                     std::atan2(static_cast<double>(p.y),
                                static_cast<double>(p.x)),
                     static_cast<double>(p.z)};
        for (int a = 0; a < 3; ++a) {
            rec.key[a] = static_cast<std::int32_t>(
                std::floor(rec.coord[a] / options.voxel_size[a]));
        }
    }
    return rec;
}

VoxelGrid reduce_voxel_records(std::vector<VoxelBinRecord>& records) {
    // Canonical member order (ascending coordinates) keeps the means
    // bit-exact under input permutation.
    std::sort(records.begin(), records.end());
    VoxelGrid grid;
    std::size_t i = 0;
    while (i < records.size()) {
        std::size_t j = i;
        std::array<double, 3> sum{0.0, 0.0, 0.0};
        while (j < records.size() && records[j].key == records[i].key) {
            for (int a = 0; a < 3; ++a) sum[a] += records[j].coord[a];
            ++j;
        }
        const double count = static_cast<double>(j - i);
        grid.cells.push_back(VoxelCell{
            records[i].key, static_cast<std::uint32_t>(j - i),
            {sum[0] / count, sum[1] / count, sum[2] / count}});
        i = j;
    }
    return grid;
}

}  // namespace detail

VoxelGrid voxelize(const PointCloud& cloud, const VoxelizeOptions& options) {
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "cannot voxelize an empty cloud");
    }
    const std::size_t n = cloud.size();
    const detail::GridNorm norm = detail::grid_norm(
        cloud, options.mode == VoxelizeOptions::Mode::Grid && options.normalize);
    std::vector<detail::VoxelBinRecord> records(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        records[i] = detail::voxel_record_of(cloud[i], options, norm);
    }
    return detail::reduce_voxel_records(records);
}

namespace {

void write_pgm(const std::filesystem::path& path, std::size_t width,
               std::size_t height, const std::vector<std::uint8_t>& gray) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoFailure,
                    "cannot open " + path.string() + " for writing");
    }
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(gray.data()),
              static_cast<std::streamsize>(gray.size()));
    if (!out) {
        throw Error(ErrorCode::IoFailure, "short write on " + path.string());
    }
}

}  // namespace

void render_range_image(const RangeImage& image, ImageChannel channel,
                        const std::filesystem::path& path) {
    const std::size_t n = image.pixels.size();
    std::vector<std::uint8_t> gray(n, 0);
    float lo = std::numeric_limits<float>::max();
    float hi = std::numeric_limits<float>::lowest();
    auto value = [&](std::size_t i) {
        return channel == ImageChannel::Range ? image.pixels[i].range
                                              : image.pixels[i].intensity;
    };
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (!image.mask[i]) continue;
        any = true;
        lo = std::min(lo, value(i));
        hi = std::max(hi, value(i));
    }
    if (any) {
        const float span = hi - lo;
        for (std::size_t i = 0; i < n; ++i) {
            if (!image.mask[i]) continue;
            gray[i] = span > 0.f
                          ? static_cast<std::uint8_t>(
                                std::lround((value(i) - lo) / span * 255.f))
                          : 255;
        }
    }
    write_pgm(path, image.width, image.height, gray);
}

void render_bev_counts(const BevImage& image,
                       const std::filesystem::path& path) {
    const std::size_t n = image.counts.size();
    std::vector<std::uint8_t> gray(n, 0);
    const std::uint32_t hi =
        n ? *std::max_element(image.counts.begin(), image.counts.end()) : 0;
    if (hi > 0) {
        for (std::size_t i = 0; i < n; ++i) {
            gray[i] = static_cast<std::uint8_t>(
                std::lround(static_cast<double>(image.counts[i]) / hi * 255.0));
        }
    }
    write_pgm(path, image.cols, image.rows, gray);
}

}  // namespace scanforge
