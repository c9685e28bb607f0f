// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "scanforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "scanforge/rng.hpp"

namespace scanforge {

namespace {

constexpr double kPi = std::numbers::pi;

struct Ray {
    double dx, dy, dz;  // unit direction from the sensor origin
};

// Nearest positive intersection of `ray` with `obj`, or +inf.
double hit_distance(const Ray& ray, const SceneObject& obj) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (obj.shape) {
        case SceneObject::Shape::GroundPlane: {
            if (ray.dz >= 0.0) return inf;
            const double t = obj.center[2] / ray.dz;
            return t > 0.0 ? t : inf;
        }
        case SceneObject::Shape::Box: {
            double tmin = 0.0, tmax = inf;
            const double d[3] = {ray.dx, ray.dy, ray.dz};
            for (int a = 0; a < 3; ++a) {
                const double lo = obj.center[a] - obj.half_extent[a];
                const double hi = obj.center[a] + obj.half_extent[a];
                if (d[a] == 0.0) {
                    if (0.0 < lo || 0.0 > hi) return inf;
                    continue;
                }
                double t0 = lo / d[a];
                double t1 = hi / d[a];
                if (t0 > t1) std::swap(t0, t1);
                tmin = std::max(tmin, t0);
                tmax = std::min(tmax, t1);
                if (tmin > tmax) return inf;
            }
            return tmin > 0.0 ? tmin : inf;
        }
        case SceneObject::Shape::Pole: {
            // |o + t*d - c|_xy = r with o at the origin.
            const double cx = obj.center[0], cy = obj.center[1];
            const double r = obj.half_extent[0];
            const double a = ray.dx * ray.dx + ray.dy * ray.dy;
            if (a == 0.0) return inf;
            const double b = -2.0 * (ray.dx * cx + ray.dy * cy);
            const double c = cx * cx + cy * cy - r * r;
            const double disc = b * b - 4.0 * a * c;
            if (disc < 0.0) return inf;
            const double t = (-b - std::sqrt(disc)) / (2.0 * a);
            if (t <= 0.0) return inf;
            const double zhit = t * ray.dz;
            if (zhit < obj.center[2] || zhit > obj.center[2] + obj.half_extent[2]) {
                return inf;
            }
            return t;
        }
    }
    return inf;
}

}  // namespace

float class_intensity(std::uint16_t class_id) {
    return 0.05f + static_cast<float>((class_id * 37u) % 91u) / 100.0f;
}

SceneSpec default_scene(std::uint64_t seed) {
    SceneSpec spec;
    spec.seed = seed;

    SceneObject ground;
    ground.shape = SceneObject::Shape::GroundPlane;
    ground.class_id = 1;
    ground.center[2] = -1.8;
    spec.objects.push_back(ground);

    Rng rng(substream(seed, stream_tag::kSynth));
    for (int i = 0; i < 6; ++i) {
        SceneObject box;
        box.shape = SceneObject::Shape::Box;
        box.class_id = 2;
        const double ang = rng.uniform(-kPi, kPi);
        const double dist = rng.uniform(8.0, 45.0);
        box.center[0] = dist * std::cos(ang);
        box.center[1] = dist * std::sin(ang);
        box.center[2] = -1.0;
        box.half_extent[0] = rng.uniform(0.8, 2.2);
        box.half_extent[1] = rng.uniform(0.8, 2.2);
        box.half_extent[2] = rng.uniform(0.6, 1.5);
        spec.objects.push_back(box);
    }
    for (int i = 0; i < 4; ++i) {
        SceneObject pole;
        pole.shape = SceneObject::Shape::Pole;
        pole.class_id = 3;
        const double ang = rng.uniform(-kPi, kPi);
        const double dist = rng.uniform(5.0, 30.0);
        pole.center[0] = dist * std::cos(ang);
        pole.center[1] = dist * std::sin(ang);
        pole.center[2] = -1.8;
        pole.half_extent[0] = rng.uniform(0.15, 0.4);
        pole.half_extent[2] = rng.uniform(3.0, 7.0);
        spec.objects.push_back(pole);
    }
    return spec;
}

SynthScene generate(const SceneSpec& spec) {
    if (spec.n_beams < 1 || spec.points_per_beam < 1) {
        throw Error(ErrorCode::DegenerateSpec,
                    "scene needs at least one beam and one point per beam");
    }
    if (!(spec.fov_up_deg > spec.fov_down_deg)) {
        throw Error(ErrorCode::DegenerateSpec, "fov_up must exceed fov_down");
    }

    const double fov_up = spec.fov_up_deg * kPi / 180.0;
    const double fov_down = spec.fov_down_deg * kPi / 180.0;
    const double jitter = spec.zenith_jitter_deg * kPi / 180.0;

    // Per-object instance ids: boxes and poles are countable things, the
    // ground and background are not.
    std::vector<std::uint16_t> instance_of(spec.objects.size(), 0);
    {
        std::uint16_t next = 1;
        for (std::size_t i = 0; i < spec.objects.size(); ++i) {
            if (spec.objects[i].shape != SceneObject::Shape::GroundPlane) {
                instance_of[i] = next++;
            }
        }
    }

    const std::size_t n =
        static_cast<std::size_t>(spec.n_beams) * spec.points_per_beam;
    SynthScene scene;
    scene.cloud.points.resize(n);
    scene.labels.labels.resize(n);
    scene.beam_ids.resize(n);

#pragma omp parallel for schedule(static)
    for (int b = 0; b < spec.n_beams; ++b) {
        const double zenith_base =
            spec.n_beams == 1
                ? 0.5 * (fov_up + fov_down)
                : fov_down + (fov_up - fov_down) * b / (spec.n_beams - 1);
        for (int j = 0; j < spec.points_per_beam; ++j) {
            const std::size_t idx =
                static_cast<std::size_t>(b) * spec.points_per_beam + j;
            double zenith = zenith_base;
            if (jitter > 0.0) {
                Rng rng(substream(spec.seed, stream_tag::kSynth, idx + 1));
                zenith += jitter * rng.normal();
            }
            const double azimuth = -kPi + 2.0 * kPi * j / spec.points_per_beam;
            const Ray ray{std::cos(zenith) * std::cos(azimuth),
                          std::cos(zenith) * std::sin(azimuth),
                          std::sin(zenith)};

            double best_t = spec.max_range;  // background sphere
            std::size_t best_obj = spec.objects.size();
            for (std::size_t o = 0; o < spec.objects.size(); ++o) {
                const double t = hit_distance(ray, spec.objects[o]);
                if (t < best_t) {
                    best_t = t;
                    best_obj = o;
                }
            }
            const std::uint16_t cls = best_obj < spec.objects.size()
                                          ? spec.objects[best_obj].class_id
                                          : spec.background_class;
            const std::uint16_t inst =
                best_obj < spec.objects.size() ? instance_of[best_obj] : 0;

            Point& p = scene.cloud.points[idx];
            p.x = static_cast<float>(best_t * ray.dx);
            p.y = static_cast<float>(best_t * ray.dy);
            p.z = static_cast<float>(best_t * ray.dz);
            p.intensity = class_intensity(cls);
            scene.labels.labels[idx] = LabelSet::make(cls, inst);
            scene.beam_ids[idx] = static_cast<std::uint16_t>(b);
        }
    }
    return scene;
}

}  // namespace scanforge
