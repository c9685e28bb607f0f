// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "scanforge/rng.hpp"
#include "scanforge/types.hpp"

namespace scanforge {

/// Fog model parameters. alpha attenuates the solid return, beta scales the
/// backscattered fog return. The benchmark samples alpha per scan from
/// {0, 0.005, 0.01, 0.02, 0.03, 0.06} and sets beta per level
/// (light 0.005, moderate 0.06, heavy 0.2).
struct FogParams {
    double alpha = 0.0;  // attenuation coefficient, 1/m
    double beta = 0.0;   // backscattering coefficient
    std::uint64_t seed = 0;

    // Received-power kernel shape for the fog return: peak range of the
    // kernel and the log-normal sigma of the per-ray range jitter.
    double peak_range = 4.0;
    double jitter_sigma = 0.3;
};

/// The alpha levels the benchmark draws from, one draw per scan.
std::span<const double> fog_alpha_levels();

/// Draws alpha for one scan from fog_alpha_levels(), seeded.
double sample_fog_alpha(std::uint64_t seed);

/// Attenuated solid return: i * exp(-2 * alpha * range).
double attenuated_response(double intensity, double range, double alpha);

struct SoftReturn {
    double intensity = 0.0;        // i_soft
    std::array<double, 3> position{};  // on the sensor->point segment
};

/// Backscattered fog return for one ray. `direction` must be unit length,
/// `range` the distance to the solid return. The returned position lies
/// strictly inside the sensor->point segment; intensity is linear in beta
/// for a fixed rng draw (so monotonically non-decreasing in beta).
SoftReturn soft_response(const std::array<double, 3>& direction, double range,
                         double intensity, double beta, Rng& rng);

/// Applies fog to a whole scan. Point count is preserved. Rays whose fog
/// return overshadows the solid one (i_soft > i_hard) are replaced by the
/// fog return and tagged Scatterer; all others keep their position with
/// attenuated intensity and stay tagged Original. Deterministic in
/// params.seed and independent of thread count.
std::pair<PointCloud, ProvenanceSet> apply_fog(const PointCloud& cloud,
                                               const FogParams& params);

/// Snowfall model parameters. Benchmark rates: light 0.5, moderate 1.5,
/// heavy 2.5 mm/h. Particle radius grows with the rate while the expected
/// number of occluded rays stays nearly flat (see densities below).
struct SnowParams {
    double rate_mm_h = 0.5;
    std::uint64_t seed = 0;

    // Linear density of occluding encounters along a ray is
    //   lambda_hit(rate) = density_coeff * rate / (1 + rate)^2   [1/m]
    // and the particle radius is
    //   rho(rate) = radius_coeff * (1 + rate)                    [m].
    // Particles are sampled per beam in the beam's sweep surface with areal
    // density lambda_hit / (2 * rho), which yields exactly lambda_hit
    // expected encounters per meter of ray.
    double density_coeff = 0.02;
    double radius_coeff = 0.01;

    // Occlusion geometry: beam footprint half-width w(d) = max(w0, div * d).
    double beam_divergence = 0.003;  // rad
    double min_footprint = 0.01;     // m
    double snow_reflectivity = 0.9;

    // Extinction applied to rays that still reach their solid return:
    // exp(-2 * extinction_coeff * rate * range).
    double extinction_coeff = 0.002;

    // Ground wetness: scale intensity of near-ground points by wet_factor.
    bool wet_ground = false;
    double wet_factor = 0.7;
    double wet_band = 0.3;  // m above the 5th-percentile z
};

double snow_particle_radius(const SnowParams& params);
double snow_hit_density(const SnowParams& params);  // lambda_hit, 1/m

/// Applies snowfall to a whole scan. Particles are sampled once per beam
/// (beam_ids aligned with the cloud; MissingBeamIds otherwise); a ray whose
/// nearest particle intersection precedes its solid return is replaced by
/// the particle hit (tag Scatterer), everything else keeps its position
/// with distance-attenuated intensity (tag Original). Point count is
/// preserved; deterministic in params.seed.
std::pair<PointCloud, ProvenanceSet> apply_snowfall(
    const PointCloud& cloud, std::span<const std::uint16_t> beam_ids,
    const SnowParams& params);

}  // namespace scanforge
