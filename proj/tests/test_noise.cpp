// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include <doctest.h>

#include "scanforge/noise.hpp"
#include "scanforge/rng.hpp"

using namespace scanforge;

namespace {

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        cloud.points.push_back(Point{static_cast<float>(rng.uniform(-60, 60)),
                                     static_cast<float>(rng.uniform(-60, 60)),
                                     static_cast<float>(rng.uniform(-5, 5)),
                                     static_cast<float>(rng.uniform())});
    }
    return cloud;
}

// Order-insensitive multiset of points, keyed on exact float values.
std::multiset<std::array<float, 4>> point_multiset(const PointCloud& cloud) {
    std::multiset<std::array<float, 4>> set;
    for (const Point& p : cloud.points) {
        set.insert({p.x, p.y, p.z, p.intensity});
    }
    return set;
}

}  // namespace

TEST_CASE("global outliers: exact injected counts at the benchmark ratios") {
    const PointCloud cloud = random_cloud(1000, 1);
    for (double ratio : {0.001, 0.05, 0.5}) {
        OutlierParams params;
        params.ratio = ratio;
        params.seed = 2;
        const auto [out, prov] = apply_global_outliers(cloud, params);
        const std::size_t expected = scaled_count(ratio, 1000);
        CHECK(out.size() == 1000 + expected);
        CHECK(prov.count(Tag::Injected) == expected);
        CHECK(prov.count(Tag::Original) == 1000);
    }
    CHECK(scaled_count(0.05, 1000) == 50);
    CHECK(scaled_count(0.001, 1000) == 1);
}

TEST_CASE("global outliers: ratio 0 is the identity") {
    const PointCloud cloud = random_cloud(100, 3);
    OutlierParams params;
    params.ratio = 0.0;
    params.seed = 4;
    const auto [out, prov] = apply_global_outliers(cloud, params);
    CHECK(out == cloud);
    CHECK(prov.count(Tag::Injected) == 0);
}

TEST_CASE("global outliers: originals pass through unchanged as a multiset") {
    const PointCloud cloud = random_cloud(500, 5);
    OutlierParams params;
    params.ratio = 0.3;
    params.seed = 6;
    const auto [out, prov] = apply_global_outliers(cloud, params);
    PointCloud originals;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (prov[i].tag == Tag::Original) originals.points.push_back(out[i]);
    }
    CHECK(point_multiset(originals) == point_multiset(cloud));
}

TEST_CASE("global outliers: injected range bounded by max clean range") {
    const PointCloud cloud = random_cloud(200, 7);
    const float max_range = cloud.max_range();
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        OutlierParams params;
        params.ratio = 0.2;
        params.seed = seed;
        const auto [out, prov] = apply_global_outliers(cloud, params);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (prov[i].tag == Tag::Injected) {
                CHECK(out[i].range() <= max_range * (1.f + 1e-6f));
                CHECK(out[i].intensity >= 0.f);
                CHECK(out[i].intensity <= 1.f);
            }
        }
    }
}

TEST_CASE("global outliers: empty cloud rejected") {
    CHECK_THROWS_AS(apply_global_outliers(PointCloud{}, OutlierParams{}), Error);
}

TEST_CASE("local distortion: exact displaced count, sigma 0 keeps positions") {
    const PointCloud cloud = random_cloud(1000, 8);
    DistortionParams params;
    params.fraction = 0.2;
    params.sigma = 0.0;
    params.seed = 9;
    const auto [out, prov] = apply_local_distortion(cloud, params);
    CHECK(out.size() == 1000);
    CHECK(prov.count(Tag::Displaced) == 200);
    CHECK(out == cloud);  // zero-variance Gaussian moves nothing
}

TEST_CASE("local distortion: set-exclusion law") {
    const PointCloud cloud = random_cloud(2000, 10);
    DistortionParams params;
    params.fraction = 0.25;
    params.sigma = 0.1;
    params.seed = 11;
    const auto [out, prov] = apply_local_distortion(cloud, params);
    const auto selected = distortion_selection(cloud.size(), params);
    REQUIRE(selected.size() == 500);

    std::vector<char> is_selected(cloud.size(), 0);
    for (std::uint32_t i : selected) is_selected[i] = 1;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (is_selected[i]) {
            CHECK(prov[i].tag == Tag::Displaced);
            CHECK(out[i].intensity == cloud[i].intensity);
        } else {
            CHECK(prov[i].tag == Tag::Original);
            CHECK(out[i] == cloud[i]);
        }
    }
}

TEST_CASE("local distortion: per-axis offset statistics at sigma 0.1") {
    const std::size_t n = 100000;
    const PointCloud cloud = random_cloud(n, 12);
    DistortionParams params;
    params.fraction = 1.0;  // displace every point: 1e5 offset samples
    params.sigma = 0.1;
    params.seed = 13;
    const auto [out, prov] = apply_local_distortion(cloud, params);
    REQUIRE(prov.count(Tag::Displaced) == n);

    for (int axis = 0; axis < 3; ++axis) {
        double mean = 0.0;
        std::vector<double> offsets(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = axis == 0 ? out[i].x - cloud[i].x
                           : axis == 1 ? out[i].y - cloud[i].y
                                       : out[i].z - cloud[i].z;
            offsets[i] = d;
            mean += d;
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double d : offsets) var += (d - mean) * (d - mean);
        const double stddev = std::sqrt(var / static_cast<double>(n - 1));
        CHECK(std::abs(mean) < 0.002);
        CHECK(stddev > 0.095);
        CHECK(stddev < 0.105);
    }
}

TEST_CASE("noise ops: deterministic in seed, different across seeds") {
    const PointCloud cloud = random_cloud(3000, 14);
    OutlierParams op;
    op.ratio = 0.1;
    op.seed = 15;
    CHECK(apply_global_outliers(cloud, op).first ==
          apply_global_outliers(cloud, op).first);
    OutlierParams op2 = op;
    op2.seed = 16;
    CHECK(apply_global_outliers(cloud, op).first.points !=
          apply_global_outliers(cloud, op2).first.points);

    DistortionParams dp;
    dp.sigma = 0.1;
    dp.seed = 17;
    CHECK(apply_local_distortion(cloud, dp).first ==
          apply_local_distortion(cloud, dp).first);
    DistortionParams dp2 = dp;
    dp2.seed = 18;
    CHECK(apply_local_distortion(cloud, dp).first.points !=
          apply_local_distortion(cloud, dp2).first.points);
}

TEST_CASE("local distortion: selection spreads over the whole cloud") {
    const std::size_t n = 50000;
    DistortionParams params;
    params.fraction = 0.2;
    params.seed = 19;
    const auto selected = distortion_selection(n, params);
    std::map<std::size_t, std::size_t> decile_counts;
    for (std::uint32_t i : selected) ++decile_counts[i / (n / 10)];
    REQUIRE(decile_counts.size() == 10);
    for (const auto& [decile, count] : decile_counts) {
        CHECK(count > 800);
        CHECK(count < 1200);
    }
}
