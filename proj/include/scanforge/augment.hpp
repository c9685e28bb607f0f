// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <set>
#include <utility>

#include "scanforge/rng.hpp"
#include "scanforge/types.hpp"

namespace scanforge {

/// Merges two labeled scans into one coordinate frame: plain concatenation,
/// a first then b.
std::pair<PointCloud, LabelSet> mix3d(const PointCloud& cloud_a,
                                      const LabelSet& labels_a,
                                      const PointCloud& cloud_b,
                                      const LabelSet& labels_b);

struct CutmixOptions {
    // Overlap test: reject a placement when any target point falls within
    // this margin of the instance's bounding box.
    double clearance = 0.5;
    int max_attempts = 10;
    // Ground height: 5th-percentile z of target points within this radius
    // of the placement.
    double ground_radius = 2.0;
};

/// Copies every instance (instance id > 0) of the requested classes from
/// `source` into `target` at a random collision-free ground position inside
/// the target's x-y bounding box. Instances that find no free spot within
/// max_attempts are skipped. An empty class set is the identity. Throws
/// NoInstancesFound when the source has no instance of any requested class.
std::pair<PointCloud, LabelSet> instance_cutmix(
    const PointCloud& target_cloud, const LabelSet& target_labels,
    const PointCloud& source_cloud, const LabelSet& source_labels,
    const std::set<std::uint16_t>& instance_classes, Rng& rng,
    const CutmixOptions& options = {});

}  // namespace scanforge
