// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "scanforge/reference.hpp"

#include <algorithm>
#include <limits>

#include "scanforge/noise_detail.hpp"
#include "scanforge/repr_detail.hpp"
#include "scanforge/weather_detail.hpp"

namespace scanforge::ref {

std::pair<PointCloud, ProvenanceSet> apply_fog(const PointCloud& cloud,
                                               const FogParams& params) {
    PointCloud out;
    out.points.resize(cloud.size());
    ProvenanceSet prov;
    prov.tags.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        detail::fog_one_point(cloud[i], i, params, out.points[i], prov.tags[i]);
    }
    return {std::move(out), std::move(prov)};
}

std::pair<PointCloud, ProvenanceSet> apply_snowfall(
    const PointCloud& cloud, std::span<const std::uint16_t> beam_ids,
    const SnowParams& params) {
    const std::size_t n = cloud.size();
    if (beam_ids.size() != n) {
        throw Error(ErrorCode::MissingBeamIds, "beam ids not aligned with cloud");
    }
    PointCloud out;
    out.points.resize(n);
    ProvenanceSet prov;
    prov.tags.resize(n);
    if (n == 0) return {std::move(out), std::move(prov)};

    if (params.rate_mm_h <= 0.0) {
        out.points = cloud.points;
        for (std::size_t i = 0; i < n; ++i) {
            prov.tags[i] =
                ProvenanceTag{Tag::Original, static_cast<std::uint32_t>(i)};
        }
        return {std::move(out), std::move(prov)};
    }

    const std::uint16_t n_beams =
        1 + *std::max_element(beam_ids.begin(), beam_ids.end());
    const double max_range = cloud.max_range();
    std::vector<std::vector<detail::SnowParticle>> per_beam(n_beams);
    for (std::uint16_t b = 0; b < n_beams; ++b) {
        per_beam[b] = detail::sample_beam_particles(params, b, max_range);
    }

    double wet_z_cutoff = 0.0;
    if (params.wet_ground) {
        std::vector<float> zs(n);
        for (std::size_t i = 0; i < n; ++i) zs[i] = cloud[i].z;
        const std::size_t k = static_cast<std::size_t>(0.05 * (n - 1));
        std::nth_element(zs.begin(), zs.begin() + k, zs.end());
        wet_z_cutoff = zs[k] + params.wet_band;
    }

    for (std::size_t i = 0; i < n; ++i) {
        detail::snow_one_point(cloud[i], i, params, per_beam[beam_ids[i]],
                               out.points[i], prov.tags[i]);
        if (params.wet_ground && prov.tags[i].tag == Tag::Original &&
            cloud[i].z <= wet_z_cutoff) {
            out.points[i].intensity =
                static_cast<float>(out.points[i].intensity * params.wet_factor);
        }
    }
    return {std::move(out), std::move(prov)};
}

std::pair<PointCloud, ProvenanceSet> apply_global_outliers(
    const PointCloud& cloud, const OutlierParams& params) {
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "cannot corrupt an empty cloud");
    }
    const std::size_t n = cloud.size();
    const std::size_t n_inject = scaled_count(params.ratio, n);
    const double radius = cloud.max_range();
    PointCloud out;
    out.points = cloud.points;
    out.points.resize(n + n_inject);
    ProvenanceSet prov;
    prov.tags.resize(n + n_inject);
    for (std::size_t i = 0; i < n; ++i) {
        prov.tags[i] = ProvenanceTag{Tag::Original, static_cast<std::uint32_t>(i)};
    }
    for (std::size_t j = 0; j < n_inject; ++j) {
        out.points[n + j] = detail::sample_outlier(params.seed, j, radius);
        prov.tags[n + j] = ProvenanceTag{Tag::Injected, 0};
    }
    return {std::move(out), std::move(prov)};
}

std::pair<PointCloud, ProvenanceSet> apply_local_distortion(
    const PointCloud& cloud, const DistortionParams& params) {
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "cannot corrupt an empty cloud");
    }
    const std::size_t n = cloud.size();
    const std::vector<std::uint32_t> selected = distortion_selection(n, params);
    PointCloud out;
    out.points = cloud.points;
    ProvenanceSet prov;
    prov.tags.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        prov.tags[i] = ProvenanceTag{Tag::Original, static_cast<std::uint32_t>(i)};
    }
    for (std::uint32_t i : selected) {
        out.points[i] = detail::jitter_point(cloud[i], params.sigma,
                                             params.seed, i);
        prov.tags[i] = ProvenanceTag{Tag::Displaced, i};
    }
    return {std::move(out), std::move(prov)};
}

RangeImage range_project(const PointCloud& cloud, std::size_t width,
                         std::size_t height, double fov_up, double fov_down) {
    if (!(fov_up > fov_down)) {
        throw Error(ErrorCode::DegenerateFov, "fov_up must exceed fov_down");
    }
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "cannot project an empty cloud");
    }
    const std::size_t n_px = width * height;
    constexpr std::uint64_t kEmpty = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> winners(n_px, kEmpty);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto px =
            detail::range_pixel_of(cloud[i], width, height, fov_up, fov_down);
        if (!px) continue;
        const std::uint64_t packed = detail::pack_range_winner(
            cloud[i].range(), static_cast<std::uint32_t>(i));
        winners[*px] = std::min(winners[*px], packed);
    }
    RangeImage img;
    img.width = width;
    img.height = height;
    img.fov_up = fov_up;
    img.fov_down = fov_down;
    img.pixels.resize(n_px);
    img.mask.assign(n_px, 0);
    for (std::size_t px = 0; px < n_px; ++px) {
        if (winners[px] == kEmpty) continue;
        const Point& p = cloud[static_cast<std::uint32_t>(winners[px] & 0xFFFFFFFFu)];
        img.pixels[px] = {p.x, p.y, p.z, p.intensity, p.range()};
        img.mask[px] = 1;
    }
    return img;
}

BevImage polar_project(const PointCloud& cloud, std::size_t rows,
                       std::size_t cols, const PolarBounds& bounds,
                       RadiusMode radius_mode) {
    if (rows < 1 || cols < 1 || !(bounds.radius_max > bounds.radius_min) ||
        !(bounds.z_max > bounds.z_min)) {
        throw Error(ErrorCode::DegenerateBounds, "invalid BEV bounds");
    }
    BevImage img;
    img.rows = rows;
    img.cols = cols;
    img.counts.assign(rows * cols, 0);
    img.mean_intensity.assign(rows * cols, 0.f);
    std::vector<double> sums(rows * cols, 0.0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto c =
            detail::polar_cell_of(cloud[i], rows, cols, bounds, radius_mode);
        if (!c) {
            ++img.dropped;
            continue;
        }
        ++img.counts[*c];
        sums[*c] += cloud[i].intensity;
    }
    for (std::size_t c = 0; c < rows * cols; ++c) {
        if (img.counts[c] > 0) {
            img.mean_intensity[c] = static_cast<float>(sums[c] / img.counts[c]);
        }
    }
    return img;
}

VoxelGrid voxelize(const PointCloud& cloud, const VoxelizeOptions& options) {
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "cannot voxelize an empty cloud");
    }
    const detail::GridNorm norm = detail::grid_norm(
        cloud, options.mode == VoxelizeOptions::Mode::Grid && options.normalize);
    std::vector<detail::VoxelBinRecord> records(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        records[i] = detail::voxel_record_of(cloud[i], options, norm);
    }
    return detail::reduce_voxel_records(records);
}

}  // namespace scanforge::ref
