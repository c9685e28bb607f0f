// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "scanforge/augment.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

namespace scanforge {

std::pair<PointCloud, LabelSet> mix3d(const PointCloud& cloud_a,
                                      const LabelSet& labels_a,
                                      const PointCloud& cloud_b,
                                      const LabelSet& labels_b) {
    check_paired(cloud_a, labels_a);
    check_paired(cloud_b, labels_b);
    PointCloud cloud;
    cloud.points.reserve(cloud_a.size() + cloud_b.size());
    cloud.points.insert(cloud.points.end(), cloud_a.points.begin(),
                        cloud_a.points.end());
    cloud.points.insert(cloud.points.end(), cloud_b.points.begin(),
                        cloud_b.points.end());
    LabelSet labels;
    labels.labels.reserve(labels_a.size() + labels_b.size());
    labels.labels.insert(labels.labels.end(), labels_a.labels.begin(),
                         labels_a.labels.end());
    labels.labels.insert(labels.labels.end(), labels_b.labels.begin(),
                         labels_b.labels.end());
    return {std::move(cloud), std::move(labels)};
}

namespace {

struct Box2 {
    float x_min = std::numeric_limits<float>::max();
    float x_max = std::numeric_limits<float>::lowest();
    float y_min = std::numeric_limits<float>::max();
    float y_max = std::numeric_limits<float>::lowest();

    void grow(const Point& p) {
        x_min = std::min(x_min, p.x);
        x_max = std::max(x_max, p.x);
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
    }
};

// 5th-percentile z of target points within `radius` of (x, y); falls back
// to the global 5th percentile when the disk is empty.
double local_ground_z(const PointCloud& cloud, double x, double y,
                      double radius) {
    std::vector<float> zs;
    const double r2 = radius * radius;
    for (const Point& p : cloud.points) {
        const double dx = p.x - x, dy = p.y - y;
        if (dx * dx + dy * dy <= r2) zs.push_back(p.z);
    }
    if (zs.empty()) {
        for (const Point& p : cloud.points) zs.push_back(p.z);
    }
    const std::size_t k = static_cast<std::size_t>(0.05 * (zs.size() - 1));
    std::nth_element(zs.begin(), zs.begin() + k, zs.end());
    return zs[k];
}

}  // namespace

std::pair<PointCloud, LabelSet> instance_cutmix(
    const PointCloud& target_cloud, const LabelSet& target_labels,
    const PointCloud& source_cloud, const LabelSet& source_labels,
    const std::set<std::uint16_t>& instance_classes, Rng& rng,
    const CutmixOptions& options) {
    check_paired(target_cloud, target_labels);
    check_paired(source_cloud, source_labels);

    PointCloud out_cloud = target_cloud;
    LabelSet out_labels = target_labels;
    if (instance_classes.empty()) return {std::move(out_cloud), std::move(out_labels)};

    // Instances keyed by (class, instance id) so ids need only be unique
    // within a class.
    std::map<std::pair<std::uint16_t, std::uint16_t>, std::vector<std::uint32_t>>
        instances;
    for (std::size_t i = 0; i < source_labels.size(); ++i) {
        const std::uint16_t cls = LabelSet::semantic(source_labels[i]);
        const std::uint16_t inst = LabelSet::instance(source_labels[i]);
        if (inst == 0 || !instance_classes.contains(cls)) continue;
        instances[{cls, inst}].push_back(static_cast<std::uint32_t>(i));
    }
    if (instances.empty()) {
        throw Error(ErrorCode::NoInstancesFound,
                    "source scan has no instance of the requested classes");
    }

    Box2 target_box;
    for (const Point& p : target_cloud.points) target_box.grow(p);

    for (const auto& [key, members] : instances) {
        // Instance extents around its centroid.
        double cx = 0, cy = 0;
        float z_min = std::numeric_limits<float>::max();
        Box2 inst_box;
        for (std::uint32_t i : members) {
            const Point& p = source_cloud[i];
            cx += p.x;
            cy += p.y;
            z_min = std::min(z_min, p.z);
            inst_box.grow(p);
        }
        cx /= static_cast<double>(members.size());
        cy /= static_cast<double>(members.size());

        bool placed = false;
        double dx = 0, dy = 0, dz = 0;
        for (int attempt = 0; attempt < options.max_attempts && !placed;
             ++attempt) {
            const double nx = rng.uniform(target_box.x_min, target_box.x_max);
            const double ny = rng.uniform(target_box.y_min, target_box.y_max);
            dx = nx - cx;
            dy = ny - cy;
            dz = local_ground_z(target_cloud, nx, ny, options.ground_radius) -
                 z_min;

            const double bx0 = inst_box.x_min + dx - options.clearance;
            const double bx1 = inst_box.x_max + dx + options.clearance;
            const double by0 = inst_box.y_min + dy - options.clearance;
            const double by1 = inst_box.y_max + dy + options.clearance;
            placed = std::none_of(
                target_cloud.points.begin(), target_cloud.points.end(),
                [&](const Point& p) {
                    return p.x >= bx0 && p.x <= bx1 && p.y >= by0 && p.y <= by1;
                });
        }
        if (!placed) continue;

        for (std::uint32_t i : members) {
            const Point& p = source_cloud[i];
            out_cloud.points.push_back(
                Point{static_cast<float>(p.x + dx), static_cast<float>(p.y + dy),
                      static_cast<float>(p.z + dz), p.intensity});
            out_labels.labels.push_back(source_labels[i]);
        }
    }
    return {std::move(out_cloud), std::move(out_labels)};
}

}  // namespace scanforge
