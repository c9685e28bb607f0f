// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "scanforge/labels.hpp"
#include "scanforge/noise.hpp"
#include "scanforge/rng.hpp"
#include "scanforge/synth.hpp"
#include "scanforge/weather.hpp"

using namespace scanforge;

namespace {

LabelSet sequential_labels(std::size_t n) {
    LabelSet set;
    for (std::size_t i = 0; i < n; ++i) {
        set.labels.push_back(LabelSet::make(
            static_cast<std::uint16_t>(1 + i % 7), 0));
    }
    return set;
}

}  // namespace

TEST_CASE("remap_labels: all-Original provenance is the identity") {
    const LabelSet clean = sequential_labels(100);
    ProvenanceSet prov;
    for (std::uint32_t i = 0; i < 100; ++i) {
        prov.tags.push_back(ProvenanceTag{Tag::Original, i});
    }
    CHECK(remap_labels(clean, prov) == clean);
}

TEST_CASE("remap_labels: injected points become ignore, count matches") {
    const LabelSet clean = sequential_labels(1000);
    ProvenanceSet prov;
    for (std::uint32_t i = 0; i < 1000; ++i) {
        prov.tags.push_back(ProvenanceTag{Tag::Original, i});
    }
    for (int j = 0; j < 50; ++j) {
        prov.tags.push_back(ProvenanceTag{Tag::Injected, 0});
    }
    const LabelSet out = remap_labels(clean, prov);
    REQUIRE(out.size() == 1050);
    std::size_t ignored = 0;
    for (std::uint32_t l : out.labels) {
        if (LabelSet::semantic(l) == LabelSet::kIgnore) {
            ++ignored;
            CHECK(l == 0);  // instance id cleared too
        }
    }
    CHECK(ignored == 50);
}

TEST_CASE("remap_labels: fog scatterers are ignore, kept points keep labels") {
    SceneSpec spec = default_scene(21);
    spec.n_beams = 16;
    spec.points_per_beam = 128;
    const SynthScene scene = generate(spec);

    FogParams params;
    params.alpha = 0.06;
    params.beta = 0.2;
    params.seed = 77;
    const auto [fogged, prov] = apply_fog(scene.cloud, params);
    const LabelSet out = remap_labels(scene.labels, prov);
    REQUIRE(out.size() == scene.labels.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (prov[i].tag == Tag::Scatterer) {
            CHECK(LabelSet::semantic(out[i]) == LabelSet::kIgnore);
        } else {
            CHECK(out[i] == scene.labels[prov[i].src]);
        }
    }
}

TEST_CASE("remap_labels: out-of-range source index is rejected") {
    const LabelSet clean = sequential_labels(4);
    ProvenanceSet prov;
    prov.tags.push_back(ProvenanceTag{Tag::Original, 4});
    CHECK_THROWS_AS(remap_labels(clean, prov), Error);
}

TEST_CASE("remap_labels_by_nn: identical cloud with tiny radius is identity") {
    SceneSpec spec = default_scene(31);
    spec.n_beams = 8;
    spec.points_per_beam = 64;
    const SynthScene scene = generate(spec);
    const LabelSet out = remap_labels_by_nn(scene.cloud, scene.labels,
                                            scene.cloud, 1e-6);
    CHECK(out == scene.labels);
}

TEST_CASE("remap_labels_by_nn: far point becomes ignore") {
    PointCloud clean;
    clean.points = {Point{0.f, 0.f, 0.f, 0.f}, Point{1.f, 0.f, 0.f, 0.f}};
    LabelSet labels;
    labels.labels = {LabelSet::make(3, 0), LabelSet::make(4, 0)};
    PointCloud corrupted;
    corrupted.points = {Point{10.f, 10.f, 10.f, 0.f}};
    const LabelSet out = remap_labels_by_nn(clean, labels, corrupted, 0.1);
    REQUIRE(out.size() == 1);
    CHECK(LabelSet::semantic(out[0]) == LabelSet::kIgnore);
}

TEST_CASE("remap_labels_by_nn: empty clean cloud and bad radius rejected") {
    PointCloud corrupted;
    corrupted.points.resize(1);
    CHECK_THROWS_AS(remap_labels_by_nn(PointCloud{}, LabelSet{}, corrupted, 1.0),
                    Error);
    PointCloud clean;
    clean.points.resize(1);
    LabelSet labels;
    labels.labels.resize(1);
    CHECK_THROWS_AS(remap_labels_by_nn(clean, labels, corrupted, 0.0), Error);
}

TEST_CASE("remap paths agree on a sparse jittered scene") {
    // Sparse scene: few beams / points so the clean inter-point spacing
    // stays above 1 m out to the background sphere.
    SceneSpec spec;
    spec.n_beams = 8;
    spec.points_per_beam = 24;
    spec.objects.clear();
    const SynthScene scene = generate(spec);

    DistortionParams params;
    params.fraction = 1.0;
    params.sigma = 0.05;
    params.seed = 5;
    const auto [jittered, prov] = apply_local_distortion(scene.cloud, params);

    const LabelSet via_prov = remap_labels(scene.labels, prov);
    const LabelSet via_nn =
        remap_labels_by_nn(scene.cloud, scene.labels, jittered, 0.5);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < via_prov.size(); ++i) {
        agree += via_prov[i] == via_nn[i];
    }
    CHECK(static_cast<double>(agree) >= 0.99 * static_cast<double>(via_prov.size()));
}

TEST_CASE("remap paths agree exactly on Original points under small radius") {
    SceneSpec spec;
    spec.n_beams = 6;
    spec.points_per_beam = 16;
    spec.objects.clear();
    const SynthScene scene = generate(spec);

    DistortionParams params;
    params.fraction = 0.3;
    params.sigma = 0.01;
    params.seed = 8;
    const auto [jittered, prov] = apply_local_distortion(scene.cloud, params);
    const LabelSet via_prov = remap_labels(scene.labels, prov);
    const LabelSet via_nn =
        remap_labels_by_nn(scene.cloud, scene.labels, jittered, 1e-4);
    for (std::size_t i = 0; i < prov.size(); ++i) {
        if (prov[i].tag == Tag::Original) CHECK(via_nn[i] == via_prov[i]);
    }
}
