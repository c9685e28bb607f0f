// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "scanforge/rng.hpp"
#include "scanforge/synth.hpp"
#include "scanforge/weather.hpp"

using namespace scanforge;

namespace {

// Big random scene for the Monte-Carlo properties. Uniform directions,
// ranges up to 80 m, intensities in (0,1).
PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x, y, z;
        do {
            x = rng.uniform(-1, 1);
            y = rng.uniform(-1, 1);
            z = rng.uniform(-1, 1);
        } while (x * x + y * y + z * z > 1.0 || x * x + y * y + z * z < 1e-6);
        const double r = 2.0 + 78.0 * rng.uniform();
        const double norm = std::sqrt(x * x + y * y + z * z);
        cloud.points.push_back(Point{
            static_cast<float>(x / norm * r), static_cast<float>(y / norm * r),
            static_cast<float>(z / norm * r), static_cast<float>(rng.uniform())});
    }
    return cloud;
}

double median_range(const PointCloud& cloud, const ProvenanceSet& prov,
                    Tag tag) {
    std::vector<float> ranges;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (prov[i].tag == tag) ranges.push_back(cloud[i].range());
    }
    REQUIRE(!ranges.empty());
    std::nth_element(ranges.begin(), ranges.begin() + ranges.size() / 2,
                     ranges.end());
    return ranges[ranges.size() / 2];
}

double mean_intensity(const PointCloud& cloud) {
    double sum = 0.0;
    for (const Point& p : cloud.points) sum += p.intensity;
    return sum / static_cast<double>(cloud.size());
}

double range_std(const std::vector<double>& values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(values.size()));
}

}  // namespace

TEST_CASE("attenuated_response: closed forms") {
    CHECK(attenuated_response(1.0, 10.0, 0.0) == doctest::Approx(1.0));
    CHECK(attenuated_response(1.0, 10.0, 0.06) ==
          doctest::Approx(std::exp(-1.2)));
    CHECK(attenuated_response(1.0, 10.0, 0.06) == doctest::Approx(0.30119).epsilon(1e-4));
    CHECK(attenuated_response(0.0, 123.0, 0.03) == 0.0);
    CHECK(attenuated_response(0.7, 25.0, 0.02) <= 0.7);
}

TEST_CASE("soft_response: zero beta backscatters nothing") {
    Rng rng(1);
    const auto soft =
        soft_response({1.0, 0.0, 0.0}, 50.0, 0.8, 0.0, rng);
    CHECK(soft.intensity == 0.0);
}

TEST_CASE("soft_response: position stays strictly inside the segment") {
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
        const auto soft =
            soft_response({0.0, 1.0, 0.0}, 50.0, 0.8, 0.2, rng);
        const double r = soft.position[1];
        CHECK(soft.position[0] == 0.0);
        CHECK(r > 0.0);
        CHECK(r < 50.0);
    }
}

TEST_CASE("soft_response: heavier fog overshadows more points") {
    const PointCloud cloud = random_cloud(10000, 42);
    std::size_t wins_light = 0, wins_heavy = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point& p = cloud[i];
        const double r = p.range();
        const std::array<double, 3> dir = {p.x / r, p.y / r, p.z / r};
        const double i_hard = attenuated_response(p.intensity, r, 0.03);
        Rng rng_a(substream(9, 1, i));
        Rng rng_b(substream(9, 1, i));  // same draw for both betas
        wins_light += soft_response(dir, r, p.intensity, 0.005, rng_a).intensity >
                      i_hard;
        wins_heavy += soft_response(dir, r, p.intensity, 0.2, rng_b).intensity >
                      i_hard;
    }
    CHECK(wins_heavy > wins_light);
}

TEST_CASE("apply_fog: alpha = beta = 0 is the identity") {
    const PointCloud cloud = random_cloud(2000, 7);
    FogParams params;
    params.alpha = 0.0;
    params.beta = 0.0;
    params.seed = 3;
    const auto [out, prov] = apply_fog(cloud, params);
    CHECK(out == cloud);
    for (std::size_t i = 0; i < prov.size(); ++i) {
        CHECK(prov[i].tag == Tag::Original);
        CHECK(prov[i].src == i);
    }
}

TEST_CASE("apply_fog: preserves N, attenuates kept points, scatters on segment") {
    const PointCloud cloud = random_cloud(20000, 8);
    FogParams params;
    params.alpha = 0.06;
    params.beta = 0.2;
    params.seed = 4;
    const auto [out, prov] = apply_fog(cloud, params);
    REQUIRE(out.size() == cloud.size());

    std::size_t scatterers = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (prov[i].tag == Tag::Original) {
            CHECK(out[i].intensity <= cloud[i].intensity);
            CHECK(out[i].x == cloud[i].x);
            CHECK(out[i].y == cloud[i].y);
            CHECK(out[i].z == cloud[i].z);
        } else {
            REQUIRE(prov[i].tag == Tag::Scatterer);
            ++scatterers;
            // Segment law: p' = t p componentwise for one t in (0,1).
            const double t = out[i].range() / cloud[i].range();
            CHECK(t > 0.0);
            CHECK(t < 1.0);
            CHECK(out[i].x == doctest::Approx(cloud[i].x * t).epsilon(1e-5));
            CHECK(out[i].y == doctest::Approx(cloud[i].y * t).epsilon(1e-5));
            CHECK(out[i].z == doctest::Approx(cloud[i].z * t).epsilon(1e-5));
        }
    }
    CHECK(scatterers > 0);

    // Fog noise concentrates near the sensor.
    CHECK(median_range(out, prov, Tag::Scatterer) <
          median_range(out, prov, Tag::Original));
}

TEST_CASE("apply_fog: mean intensity strictly decreases with alpha") {
    const PointCloud cloud = random_cloud(100000, 9);
    FogParams params;
    params.beta = 0.06;
    params.seed = 5;
    params.alpha = 0.005;
    const double m1 = mean_intensity(apply_fog(cloud, params).first);
    params.alpha = 0.06;
    const double m2 = mean_intensity(apply_fog(cloud, params).first);
    CHECK(m2 < m1);
}

TEST_CASE("apply_fog: scatterer count non-decreasing in beta") {
    const PointCloud cloud = random_cloud(20000, 10);
    FogParams params;
    params.alpha = 0.03;
    params.seed = 6;
    std::size_t last = 0;
    for (double beta : {0.005, 0.06, 0.2}) {
        params.beta = beta;
        const auto [out, prov] = apply_fog(cloud, params);
        const std::size_t count = prov.count(Tag::Scatterer);
        CHECK(count >= last);
        last = count;
    }
    CHECK(last > 0);
}

TEST_CASE("apply_fog: deterministic in seed") {
    const PointCloud cloud = random_cloud(5000, 11);
    FogParams params;
    params.alpha = 0.02;
    params.beta = 0.06;
    params.seed = 12;
    const auto a = apply_fog(cloud, params);
    const auto b = apply_fog(cloud, params);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    params.seed = 13;
    const auto c = apply_fog(cloud, params);
    CHECK(a.first.points != c.first.points);
}

TEST_CASE("sample_fog_alpha draws from the six levels") {
    bool seen_nonzero = false;
    for (std::uint64_t s = 0; s < 64; ++s) {
        const double a = sample_fog_alpha(s);
        const auto levels = fog_alpha_levels();
        CHECK(std::find(levels.begin(), levels.end(), a) != levels.end());
        seen_nonzero |= a > 0.0;
    }
    CHECK(seen_nonzero);
}

TEST_CASE("apply_snowfall: zero rate is the identity") {
    SceneSpec spec = default_scene(40);
    spec.n_beams = 16;
    spec.points_per_beam = 128;
    const SynthScene scene = generate(spec);
    SnowParams params;
    params.rate_mm_h = 0.0;
    params.seed = 1;
    const auto [out, prov] = apply_snowfall(scene.cloud, scene.beam_ids, params);
    CHECK(out == scene.cloud);
    for (std::size_t i = 0; i < prov.size(); ++i) {
        CHECK(prov[i].tag == Tag::Original);
    }
}

TEST_CASE("apply_snowfall: misaligned beam ids are rejected") {
    PointCloud cloud;
    cloud.points.resize(4);
    std::vector<std::uint16_t> beams(3, 0);
    CHECK_THROWS_AS(apply_snowfall(cloud, beams, SnowParams{}), Error);
}

TEST_CASE("apply_snowfall: rate changes size more than count") {
    SceneSpec spec = default_scene(41);
    spec.n_beams = 64;
    spec.points_per_beam = 1024;
    const SynthScene scene = generate(spec);

    SnowParams light;
    light.rate_mm_h = 0.5;
    light.seed = 2;
    SnowParams heavy = light;
    heavy.rate_mm_h = 2.5;

    const auto [out_l, prov_l] =
        apply_snowfall(scene.cloud, scene.beam_ids, light);
    const auto [out_h, prov_h] =
        apply_snowfall(scene.cloud, scene.beam_ids, heavy);
    const auto n_l = static_cast<double>(prov_l.count(Tag::Scatterer));
    const auto n_h = static_cast<double>(prov_h.count(Tag::Scatterer));
    REQUIRE(n_l > 0);
    REQUIRE(n_h > 0);
    CHECK(out_l.size() == scene.cloud.size());
    CHECK(out_h.size() == scene.cloud.size());

    // Counts stay close while the configured particle radius grows.
    CHECK(std::abs(n_h - n_l) / n_l < 0.25);
    CHECK(snow_particle_radius(heavy) > snow_particle_radius(light));
}

TEST_CASE("apply_snowfall: scatterers spread wider than fog's") {
    SceneSpec spec = default_scene(42);
    spec.n_beams = 32;
    spec.points_per_beam = 512;
    const SynthScene scene = generate(spec);

    SnowParams snow;
    snow.rate_mm_h = 1.5;
    snow.seed = 3;
    const auto [snow_out, snow_prov] =
        apply_snowfall(scene.cloud, scene.beam_ids, snow);

    FogParams fog;
    fog.alpha = 0.03;
    fog.beta = 0.2;
    fog.seed = 3;
    const auto [fog_out, fog_prov] = apply_fog(scene.cloud, fog);

    std::vector<double> snow_ranges, fog_ranges;
    for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
        if (snow_prov[i].tag == Tag::Scatterer) {
            snow_ranges.push_back(snow_out[i].range());
        }
        if (fog_prov[i].tag == Tag::Scatterer) {
            fog_ranges.push_back(fog_out[i].range());
        }
    }
    REQUIRE(snow_ranges.size() > 10);
    REQUIRE(fog_ranges.size() > 10);
    CHECK(range_std(snow_ranges) > range_std(fog_ranges));
}

TEST_CASE("apply_snowfall: kept points only lose intensity, deterministic") {
    SceneSpec spec = default_scene(43);
    spec.n_beams = 16;
    spec.points_per_beam = 256;
    const SynthScene scene = generate(spec);
    SnowParams params;
    params.rate_mm_h = 1.5;
    params.seed = 4;
    const auto [out, prov] = apply_snowfall(scene.cloud, scene.beam_ids, params);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (prov[i].tag == Tag::Original) {
            CHECK(out[i].x == scene.cloud[i].x);
            CHECK(out[i].intensity <= scene.cloud[i].intensity);
        }
    }
    const auto again = apply_snowfall(scene.cloud, scene.beam_ids, params);
    CHECK(again.first == out);
}

TEST_CASE("apply_snowfall: wet ground damps near-ground returns when enabled") {
    SceneSpec spec = default_scene(44);
    spec.n_beams = 16;
    spec.points_per_beam = 256;
    const SynthScene scene = generate(spec);
    SnowParams params;
    params.rate_mm_h = 0.5;
    params.seed = 5;
    const auto [dry, dry_prov] =
        apply_snowfall(scene.cloud, scene.beam_ids, params);
    params.wet_ground = true;
    const auto [wet, wet_prov] =
        apply_snowfall(scene.cloud, scene.beam_ids, params);
    REQUIRE(dry_prov == wet_prov);
    bool any_damped = false;
    for (std::size_t i = 0; i < wet.size(); ++i) {
        if (wet_prov[i].tag != Tag::Original) continue;
        CHECK(wet[i].intensity <= dry[i].intensity);
        any_damped |= wet[i].intensity < dry[i].intensity;
    }
    CHECK(any_damped);
}
