// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "scanforge/weather.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scanforge/weather_detail.hpp"

namespace scanforge {

namespace {
constexpr double kAlphaLevels[] = {0.0, 0.005, 0.01, 0.02, 0.03, 0.06};
}

std::span<const double> fog_alpha_levels() { return kAlphaLevels; }

double sample_fog_alpha(std::uint64_t seed) {
    Rng rng(substream(seed, stream_tag::kFogAlpha));
    return kAlphaLevels[rng.below(std::size(kAlphaLevels))];
}

double attenuated_response(double intensity, double range, double alpha) {
    return intensity * std::exp(-2.0 * alpha * range);
}

double detail::fog_power_kernel(double range, double peak_range) {
    // Rises ~d^2 through the blind zone near the sensor, peaks at
    // peak_range with value 1, then decays exponentially.
    const double u = range / peak_range;
    return u * u * std::exp(2.0 * (1.0 - u));
}

SoftReturn soft_response(const std::array<double, 3>& direction, double range,
                         double intensity, double beta, Rng& rng) {
    FogParams params;
    params.beta = beta;
    const detail::FogReturn r = detail::fog_point_response(
        range, intensity, params, rng.next_u64());
    return SoftReturn{r.soft_intensity,
                      {direction[0] * r.soft_range, direction[1] * r.soft_range,
                       direction[2] * r.soft_range}};
}

detail::FogReturn detail::fog_point_response(double range, double intensity,
                                             const FogParams& params,
                                             std::uint64_t stream) {
    Rng rng(stream);
    const double jitter = rng.lognormal_unit(params.jitter_sigma);
    // Argmax of the power kernel along the (0, range) segment, jittered,
    // kept strictly inside the segment.
    const double hit = std::min(params.peak_range * jitter, 0.9 * range);
    FogReturn out;
    out.soft_range = hit;
    out.soft_intensity =
        intensity * params.beta * fog_power_kernel(hit, params.peak_range);
    return out;
}

std::pair<PointCloud, ProvenanceSet> apply_fog(const PointCloud& cloud,
                                               const FogParams& params) {
    const std::size_t n = cloud.size();
    PointCloud out;
    out.points.resize(n);
    ProvenanceSet prov;
    prov.tags.resize(n);

#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        detail::fog_one_point(cloud[i], i, params, out.points[i], prov.tags[i]);
    }
    return {std::move(out), std::move(prov)};
}

void detail::fog_one_point(const Point& p, std::size_t index,
                           const FogParams& params, Point& out,
                           ProvenanceTag& tag) {
    const double range = p.range();
    const double i_hard = attenuated_response(p.intensity, range, params.alpha);
    if (range <= 0.0) {
        out = Point{p.x, p.y, p.z, static_cast<float>(i_hard)};
        tag = ProvenanceTag{Tag::Original, static_cast<std::uint32_t>(index)};
        return;
    }
    const FogReturn fog = fog_point_response(
        range, p.intensity, params,
        substream(params.seed, stream_tag::kFog, index));
    if (fog.soft_intensity > i_hard) {
        const double t = fog.soft_range / range;
        out = Point{static_cast<float>(p.x * t), static_cast<float>(p.y * t),
                    static_cast<float>(p.z * t),
                    static_cast<float>(std::min(fog.soft_intensity, 1.0))};
        tag = ProvenanceTag{Tag::Scatterer, 0};
    } else {
        out = Point{p.x, p.y, p.z, static_cast<float>(i_hard)};
        tag = ProvenanceTag{Tag::Original, static_cast<std::uint32_t>(index)};
    }
}

double snow_particle_radius(const SnowParams& params) {
    return params.radius_coeff * (1.0 + params.rate_mm_h);
}

double snow_hit_density(const SnowParams& params) {
    const double r = params.rate_mm_h;
    return params.density_coeff * r / ((1.0 + r) * (1.0 + r));
}

std::vector<detail::SnowParticle> detail::sample_beam_particles(
    const SnowParams& params, std::uint16_t beam_id, double max_range) {
    const double rho = snow_particle_radius(params);
    const double lambda_hit = snow_hit_density(params);
    const double areal = lambda_hit / (2.0 * rho);
    constexpr double d_min = 1.0;
    if (max_range <= d_min || areal <= 0.0) return {};

    const double area = std::numbers::pi * (max_range * max_range - d_min * d_min);
    Rng rng(substream(params.seed, stream_tag::kSnowBeam, beam_id));
    const std::uint64_t count = rng.poisson(areal * area);

    std::vector<SnowParticle> particles(count);
    for (auto& part : particles) {
        // Uniform over the annulus area: d ~ sqrt(U) over [d_min^2, R^2].
        const double u = rng.uniform();
        part.dist = std::sqrt(d_min * d_min +
                              u * (max_range * max_range - d_min * d_min));
        part.azimuth = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
    std::sort(particles.begin(), particles.end(),
              [](const SnowParticle& a, const SnowParticle& b) {
                  return a.azimuth < b.azimuth ||
                         (a.azimuth == b.azimuth && a.dist < b.dist);
              });
    return particles;
}

void detail::snow_one_point(const Point& p, std::size_t index,
                            const SnowParams& params,
                            std::span<const SnowParticle> particles,
                            Point& out, ProvenanceTag& tag) {
    const double range = p.range();
    const double rho = snow_particle_radius(params);
    double hit_dist = range;

    if (range > 0.0 && !particles.empty()) {
        const double azimuth = std::atan2(p.y, p.x);
        // Particles within |dphi| <= rho / d can intersect this ray; d >= 1,
        // so rho bounds the search window.
        const double window = rho;
        auto consider = [&](const SnowParticle& part, double dphi) {
            if (part.dist >= hit_dist) return;
            if (std::abs(dphi) * part.dist <= rho) hit_dist = part.dist;
        };
        auto lo = std::lower_bound(
            particles.begin(), particles.end(), azimuth - window,
            [](const SnowParticle& s, double v) { return s.azimuth < v; });
        auto hi = std::upper_bound(
            particles.begin(), particles.end(), azimuth + window,
            [](double v, const SnowParticle& s) { return v < s.azimuth; });
        for (auto it = lo; it != hi; ++it) consider(*it, it->azimuth - azimuth);
        // Wrap-around near +-pi.
        constexpr double pi = std::numbers::pi;
        if (azimuth - window < -pi) {
            const double wrapped = azimuth + 2.0 * pi;
            auto wlo = std::lower_bound(
                particles.begin(), particles.end(), wrapped - window,
                [](const SnowParticle& s, double v) { return s.azimuth < v; });
            for (auto it = wlo; it != particles.end(); ++it)
                consider(*it, it->azimuth - wrapped);
        }
        if (azimuth + window > pi) {
            const double wrapped = azimuth - 2.0 * pi;
            auto whi = std::upper_bound(
                particles.begin(), particles.end(), wrapped + window,
                [](double v, const SnowParticle& s) { return v < s.azimuth; });
            for (auto it = particles.begin(); it != whi; ++it)
                consider(*it, it->azimuth - wrapped);
        }
    }

    if (hit_dist < range) {
        // Occluded: the return comes from the particle. Brightness scales
        // with the footprint fraction the particle covers at that distance.
        const double footprint =
            std::max(params.min_footprint, params.beam_divergence * hit_dist);
        const double cover = std::min(1.0, (rho / footprint) * (rho / footprint));
        const double t = hit_dist / range;
        out = Point{static_cast<float>(p.x * t), static_cast<float>(p.y * t),
                    static_cast<float>(p.z * t),
                    static_cast<float>(std::clamp(
                        p.intensity * params.snow_reflectivity * cover, 0.0, 1.0))};
        tag = ProvenanceTag{Tag::Scatterer, 0};
    } else {
        const double atten =
            std::exp(-2.0 * params.extinction_coeff * params.rate_mm_h * range);
        out = Point{p.x, p.y, p.z, static_cast<float>(p.intensity * atten)};
        tag = ProvenanceTag{Tag::Original, static_cast<std::uint32_t>(index)};
    }
}

std::pair<PointCloud, ProvenanceSet> apply_snowfall(
    const PointCloud& cloud, std::span<const std::uint16_t> beam_ids,
    const SnowParams& params) {
    const std::size_t n = cloud.size();
    if (beam_ids.size() != n) {
        throw Error(ErrorCode::MissingBeamIds,
                    "beam ids (" + std::to_string(beam_ids.size()) +
                        ") not aligned with cloud (" + std::to_string(n) + ")");
    }
    PointCloud out;
    out.points.resize(n);
    ProvenanceSet prov;
    prov.tags.resize(n);
    if (n == 0) return {std::move(out), std::move(prov)};

    if (params.rate_mm_h <= 0.0) {  // no snow: exact identity
        out.points = cloud.points;
        for (std::size_t i = 0; i < n; ++i) {
            prov.tags[i] = ProvenanceTag{Tag::Original,
                                         static_cast<std::uint32_t>(i)};
        }
        return {std::move(out), std::move(prov)};
    }

    const std::uint16_t n_beams =
        1 + *std::max_element(beam_ids.begin(), beam_ids.end());
    const double max_range = cloud.max_range();

    std::vector<std::vector<detail::SnowParticle>> per_beam(n_beams);
#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < n_beams; ++b) {
        per_beam[b] = detail::sample_beam_particles(
            params, static_cast<std::uint16_t>(b), max_range);
    }

    double wet_z_cutoff = 0.0;
    if (params.wet_ground) {
        std::vector<float> zs(n);
        for (std::size_t i = 0; i < n; ++i) zs[i] = cloud[i].z;
        const std::size_t k = static_cast<std::size_t>(0.05 * (n - 1));
        std::nth_element(zs.begin(), zs.begin() + k, zs.end());
        wet_z_cutoff = zs[k] + params.wet_band;
    }

#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
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

}  // namespace scanforge
