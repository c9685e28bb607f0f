// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include <doctest.h>

#include "scanforge/device.hpp"
#include "scanforge/synth.hpp"

using namespace scanforge;

namespace {

// Fraction of points whose cluster agrees with the generation beams, after
// the best cluster->beam matching (a permutation may relabel clusters).
double beam_agreement(const SynthScene& scene, const BeamAssignment& assignment) {
    std::map<std::pair<std::uint16_t, std::uint16_t>, std::size_t> pairs;
    for (std::size_t i = 0; i < scene.beam_ids.size(); ++i) {
        ++pairs[{assignment.beam_of[i], scene.beam_ids[i]}];
    }
    // Clusters and true beams are both zenith-ordered intervals, so the
    // majority vote per cluster is the right matching.
    std::map<std::uint16_t, std::pair<std::uint16_t, std::size_t>> best;
    for (const auto& [key, count] : pairs) {
        auto& entry = best[key.first];
        if (count > entry.second) entry = {key.second, count};
    }
    std::size_t agree = 0;
    for (std::size_t i = 0; i < scene.beam_ids.size(); ++i) {
        if (best[assignment.beam_of[i]].first == scene.beam_ids[i]) ++agree;
    }
    return static_cast<double>(agree) /
           static_cast<double>(scene.beam_ids.size());
}

SynthScene reference_scene(double jitter_deg) {
    SceneSpec spec = default_scene(50);
    spec.n_beams = 64;
    spec.points_per_beam = 512;
    spec.zenith_jitter_deg = jitter_deg;
    return generate(spec);
}

std::set<std::uint16_t> beams_present(const SynthScene& scene,
                                      const ProvenanceSet& prov) {
    std::set<std::uint16_t> beams;
    for (const ProvenanceTag& t : prov.tags) beams.insert(scene.beam_ids[t.src]);
    return beams;
}

}  // namespace

TEST_CASE("spherical_angles: closed forms and error path") {
    const auto [theta0, phi0] = spherical_angles(Point{1.f, 0.f, 0.f, 0.f});
    CHECK(theta0 == doctest::Approx(0.0));
    CHECK(phi0 == doctest::Approx(0.0));

    const auto [theta1, phi1] =
        spherical_angles(Point{1.f, 1.f, static_cast<float>(std::sqrt(2.0)), 0.f});
    CHECK(theta1 == doctest::Approx(std::numbers::pi / 4));
    CHECK(phi1 == doctest::Approx(std::numbers::pi / 4));

    const auto [theta2, phi2] = spherical_angles(Point{-1.f, -1.f, 0.f, 0.f});
    CHECK(phi2 == doctest::Approx(-3.0 * std::numbers::pi / 4));
    CHECK(theta2 == doctest::Approx(0.0));

    CHECK_THROWS_AS(spherical_angles(Point{0.f, 0.f, 1.f, 0.f}), Error);
    CHECK_THROWS_AS(spherical_angles(Point{0.f, 0.f, 0.f, 0.f}), Error);
}

TEST_CASE("assign_beam_labels: recovers exact rings on a clean scene") {
    const SynthScene scene = reference_scene(0.0);
    const BeamAssignment assignment = assign_beam_labels(scene.cloud, 64);
    REQUIRE(assignment.beam_count() == 64);
    CHECK(std::is_sorted(assignment.centers.begin(), assignment.centers.end()));
    CHECK(std::adjacent_find(assignment.centers.begin(),
                             assignment.centers.end()) ==
          assignment.centers.end());
    CHECK(beam_agreement(scene, assignment) == 1.0);
}

TEST_CASE("assign_beam_labels: jittered scene still nearly perfect") {
    const SynthScene scene = reference_scene(0.02);
    const BeamAssignment assignment = assign_beam_labels(scene.cloud, 64);
    CHECK(beam_agreement(scene, assignment) >= 0.999);
}

TEST_CASE("assign_beam_labels: k = 1 centers on the mean zenith") {
    SceneSpec spec;
    spec.n_beams = 4;
    spec.points_per_beam = 16;
    spec.objects.clear();
    const SynthScene scene = generate(spec);
    const BeamAssignment assignment = assign_beam_labels(scene.cloud, 1);
    REQUIRE(assignment.beam_count() == 1);
    double mean = 0.0;
    for (const Point& p : scene.cloud.points) {
        mean += std::atan2(p.z, p.range_xy());
    }
    mean /= static_cast<double>(scene.cloud.size());
    CHECK(assignment.centers[0] == doctest::Approx(mean).epsilon(1e-9));
    for (auto b : assignment.beam_of) CHECK(b == 0);
}

TEST_CASE("assign_beam_labels: k = N puts each point in its own beam") {
    PointCloud cloud;
    for (int i = 0; i < 8; ++i) {
        const double theta = -0.4 + 0.1 * i;
        cloud.points.push_back(Point{static_cast<float>(std::cos(theta)), 0.f,
                                     static_cast<float>(std::sin(theta)), 0.f});
    }
    const BeamAssignment assignment = assign_beam_labels(cloud, 8);
    std::set<std::uint16_t> beams(assignment.beam_of.begin(),
                                  assignment.beam_of.end());
    CHECK(beams.size() == 8);
}

TEST_CASE("assign_beam_labels: too few points rejected") {
    PointCloud cloud;
    cloud.points.resize(3, Point{1.f, 0.f, 0.f, 0.f});
    CHECK_THROWS_AS(assign_beam_labels(cloud, 4), Error);
}

TEST_CASE("assign_beam_labels: Lloyd objective never increases") {
    const SynthScene scene = reference_scene(0.1);  // jitter forces iterations
    std::vector<double> trace;
    assign_beam_labels(scene.cloud, 64, &trace);
    REQUIRE(!trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i) {
        CHECK(trace[i] <= trace[i - 1] * (1 + 1e-12));
    }
}

TEST_CASE("reduce_beams: 64 -> 32 keeps alternating rings from the top") {
    const SynthScene scene = reference_scene(0.0);
    const BeamAssignment assignment = assign_beam_labels(scene.cloud, 64);
    const auto [cloud, labels, prov] =
        reduce_beams(scene.cloud, scene.labels, assignment, 32);
    CHECK(cloud.size() == scene.cloud.size() / 2);
    CHECK(labels.size() == cloud.size());

    const std::set<std::uint16_t> kept = beams_present(scene, prov);
    CHECK(kept.size() == 32);
    // Beam 63 is the top ring (highest zenith) and must be kept.
    CHECK(kept.contains(63));
    for (std::uint16_t b : kept) CHECK((63 - b) % 2 == 0);

    for (std::size_t i = 0; i < prov.size(); ++i) {
        CHECK(prov[i].tag == Tag::Original);
        CHECK(cloud[i] == scene.cloud[prov[i].src]);
        CHECK(labels[i] == scene.labels[prov[i].src]);
    }
}

TEST_CASE("reduce_beams: 64 -> 64 is the identity") {
    const SynthScene scene = reference_scene(0.0);
    const BeamAssignment assignment = assign_beam_labels(scene.cloud, 64);
    const auto [cloud, labels, prov] =
        reduce_beams(scene.cloud, scene.labels, assignment, 64);
    CHECK(cloud == scene.cloud);
    CHECK(labels == scene.labels);
}

TEST_CASE("reduce_beams: 64 -> 16 leaves 16 distinct rings") {
    const SynthScene scene = reference_scene(0.0);
    const BeamAssignment assignment = assign_beam_labels(scene.cloud, 64);
    const auto [cloud, labels, prov] =
        reduce_beams(scene.cloud, scene.labels, assignment, 16);
    CHECK(beams_present(scene, prov).size() == 16);
    CHECK(cloud.size() == scene.cloud.size() / 4);
}

TEST_CASE("reduce_beams: indivisible targets rejected") {
    const SynthScene scene = reference_scene(0.0);
    const BeamAssignment assignment = assign_beam_labels(scene.cloud, 64);
    CHECK_THROWS_AS(reduce_beams(scene.cloud, scene.labels, assignment, 48),
                    Error);
    CHECK_THROWS_AS(reduce_beams(scene.cloud, scene.labels, assignment, 0),
                    Error);
}

TEST_CASE("subsample_azimuth: keep ratio 1 is the identity") {
    const SynthScene scene = reference_scene(0.0);
    const BeamAssignment assignment = assign_beam_labels(scene.cloud, 64);
    const auto [cloud, labels, prov] =
        subsample_azimuth(scene.cloud, scene.labels, assignment, 1);
    CHECK(cloud == scene.cloud);
    CHECK(labels == scene.labels);
}

TEST_CASE("subsample_azimuth: per-beam counts are ceil(n_b / m)") {
    SceneSpec spec = default_scene(51);
    spec.n_beams = 4;
    spec.points_per_beam = 1863;
    const SynthScene scene = generate(spec);
    const BeamAssignment assignment = assign_beam_labels(scene.cloud, 4);

    for (std::size_t m : {2u, 16u}) {
        const auto [cloud, labels, prov] =
            subsample_azimuth(scene.cloud, scene.labels, assignment, m);
        std::map<std::uint16_t, std::size_t> kept_per_beam;
        for (const ProvenanceTag& t : prov.tags) {
            ++kept_per_beam[assignment.beam_of[t.src]];
        }
        REQUIRE(kept_per_beam.size() == 4);
        const std::size_t expected = (1863 + m - 1) / m;
        for (const auto& [beam, count] : kept_per_beam) {
            CHECK(count == expected);
        }
    }
    // The reference split: 1863 points at 1/2 keep 932.
    const auto [cloud, labels, prov] =
        subsample_azimuth(scene.cloud, scene.labels, assignment, 2);
    CHECK(cloud.size() == 4 * 932);
}

TEST_CASE("reduce and subsample commute on a synthetic scene") {
    const SynthScene scene = reference_scene(0.0);
    const BeamAssignment assignment = assign_beam_labels(scene.cloud, 64);

    const auto [ra_cloud, ra_labels, ra_prov] =
        reduce_beams(scene.cloud, scene.labels, assignment, 32);
    const BeamAssignment ra_assignment =
        restrict_assignment(assignment, ra_prov);
    const auto [rab_cloud, rab_labels, rab_prov] =
        subsample_azimuth(ra_cloud, ra_labels, ra_assignment, 2);

    const auto [sb_cloud, sb_labels, sb_prov] =
        subsample_azimuth(scene.cloud, scene.labels, assignment, 2);
    const BeamAssignment sb_assignment =
        restrict_assignment(assignment, sb_prov);
    const auto [sba_cloud, sba_labels, sba_prov] =
        reduce_beams(sb_cloud, sb_labels, sb_assignment, 32);

    CHECK(rab_cloud == sba_cloud);
    CHECK(rab_labels == sba_labels);
}

TEST_CASE("subsampling outputs are subsets of the input multiset") {
    const SynthScene scene = reference_scene(0.0);
    const BeamAssignment assignment = assign_beam_labels(scene.cloud, 64);
    const auto [cloud, labels, prov] =
        reduce_beams(scene.cloud, scene.labels, assignment, 16);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(cloud[i] == scene.cloud[prov[i].src]);
    }
    const auto [cloud2, labels2, prov2] =
        subsample_azimuth(scene.cloud, scene.labels, assignment, 4);
    for (std::size_t i = 0; i < cloud2.size(); ++i) {
        CHECK(cloud2[i] == scene.cloud[prov2[i].src]);
    }
}
