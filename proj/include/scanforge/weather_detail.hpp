// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scanforge/weather.hpp"

namespace scanforge::detail {

// Per-point / per-beam building blocks shared by the OpenMP kernels and the
// serial reference drivers. Each is a pure function of its arguments.

double fog_power_kernel(double range, double peak_range);

struct FogReturn {
    double soft_intensity = 0.0;
    double soft_range = 0.0;
};

FogReturn fog_point_response(double range, double intensity,
                             const FogParams& params, std::uint64_t stream);

void fog_one_point(const Point& p, std::size_t index, const FogParams& params,
                   Point& out, ProvenanceTag& tag);

struct SnowParticle {
    double dist = 0.0;     // range from the sensor, in the sweep surface
    double azimuth = 0.0;  // radians, [-pi, pi)
};

std::vector<SnowParticle> sample_beam_particles(const SnowParams& params,
                                                std::uint16_t beam_id,
                                                double max_range);

void snow_one_point(const Point& p, std::size_t index, const SnowParams& params,
                    std::span<const SnowParticle> particles, Point& out,
                    ProvenanceTag& tag);

}  // namespace scanforge::detail
