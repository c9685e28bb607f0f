// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "scanforge/types.hpp"

namespace scanforge {

/// Analytic obstacle for the synthetic scene generator. Poses are axis
/// aligned; that is enough to give every ray an unambiguous class.
struct SceneObject {
    enum class Shape { GroundPlane, Box, Pole };

    Shape shape = Shape::GroundPlane;
    std::uint16_t class_id = 1;

    // GroundPlane: z = center[2].
    // Box: axis-aligned, center +- half_extent.
    // Pole: vertical cylinder at (center[0], center[1]), radius
    // half_extent[0], from center[2] to center[2] + half_extent[2].
    double center[3] = {0, 0, 0};
    double half_extent[3] = {0, 0, 0};
};

struct SceneSpec {
    int n_beams = 64;
    int points_per_beam = 1863;
    double fov_up_deg = 3.0;
    double fov_down_deg = -25.0;
    double max_range = 80.0;           // radius of the enclosing background
    std::uint16_t background_class = 9;
    double zenith_jitter_deg = 0.0;    // per-point Gaussian jitter, for
                                       // stress-testing beam clustering
    std::vector<SceneObject> objects;
    std::uint64_t seed = 0;
};

struct SynthScene {
    PointCloud cloud;
    LabelSet labels;
    std::vector<std::uint16_t> beam_ids;  // generation-truth beam per point
};

/// Deterministic default scene: ground plane, a few boxes and poles. Object
/// poses are a pure function of `seed`.
SceneSpec default_scene(std::uint64_t seed);

/// Ray-casts the spec: n_beams zenith rings evenly spaced in
/// [fov_down, fov_up], points_per_beam azimuths evenly spaced in [-pi, pi)
/// per ring. Every ray hits either an object or the background sphere, so
/// N = n_beams * points_per_beam exactly. Intensity is a fixed per-class
/// constant. Throws DegenerateSpec on zero beams/points or fov_up <= fov_down.
SynthScene generate(const SceneSpec& spec);

/// Per-class constant used by generate(); exposed for tests.
float class_intensity(std::uint16_t class_id);

}  // namespace scanforge
