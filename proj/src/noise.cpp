// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "scanforge/noise.hpp"

#include <algorithm>
#include <cmath>

#include "scanforge/noise_detail.hpp"
#include "scanforge/rng.hpp"

namespace scanforge {

std::size_t scaled_count(double ratio, std::size_t n) {
    return static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(n) + 0.5));
}

Point detail::sample_outlier(std::uint64_t seed, std::size_t index,
                             double radius) {
    Rng rng(substream(seed, stream_tag::kOutlier, index));
    // Rejection from the bounding cube; expected 1.91 draws per point.
    double x, y, z;
    do {
        x = rng.uniform(-1.0, 1.0);
        y = rng.uniform(-1.0, 1.0);
        z = rng.uniform(-1.0, 1.0);
    } while (x * x + y * y + z * z > 1.0);
    return Point{static_cast<float>(x * radius), static_cast<float>(y * radius),
                 static_cast<float>(z * radius),
                 static_cast<float>(rng.uniform())};
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
    out.points.resize(n + n_inject);
    ProvenanceSet prov;
    prov.tags.resize(n + n_inject);

    std::copy(cloud.points.begin(), cloud.points.end(), out.points.begin());
    for (std::size_t i = 0; i < n; ++i) {
        prov.tags[i] = ProvenanceTag{Tag::Original, static_cast<std::uint32_t>(i)};
    }

#pragma omp parallel for schedule(static)
    for (std::int64_t jj = 0; jj < static_cast<std::int64_t>(n_inject); ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        out.points[n + j] = detail::sample_outlier(params.seed, j, radius);
        prov.tags[n + j] = ProvenanceTag{Tag::Injected, 0};
    }
    return {std::move(out), std::move(prov)};
}

std::vector<std::uint32_t> distortion_selection(std::size_t n,
                                                const DistortionParams& params) {
    const std::size_t n_sel =
        std::min(scaled_count(params.fraction, n), n);
    std::vector<std::uint32_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
    Rng rng(substream(params.seed, stream_tag::kDistortSelect));
    // Partial Fisher-Yates: the first n_sel slots end up a uniform sample
    // without replacement.
    for (std::size_t i = 0; i < n_sel; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n_sel);
    std::sort(idx.begin(), idx.end());
    return idx;
}

Point detail::jitter_point(const Point& p, double sigma, std::uint64_t seed,
                           std::size_t index) {
    Rng rng(substream(seed, stream_tag::kDistortOffset, index));
    return Point{static_cast<float>(p.x + sigma * rng.normal()),
                 static_cast<float>(p.y + sigma * rng.normal()),
                 static_cast<float>(p.z + sigma * rng.normal()), p.intensity};
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

    // Offsets are keyed by the original point index, not selection order, so
    // the result is independent of iteration order and thread count.
#pragma omp parallel for schedule(static)
    for (std::int64_t kk = 0; kk < static_cast<std::int64_t>(selected.size());
         ++kk) {
        const std::uint32_t i = selected[static_cast<std::size_t>(kk)];
        out.points[i] = detail::jitter_point(cloud[i], params.sigma,
                                             params.seed, i);
        prov.tags[i] = ProvenanceTag{Tag::Displaced, i};
    }
    return {std::move(out), std::move(prov)};
}

}  // namespace scanforge
