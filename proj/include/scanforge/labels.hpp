// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scanforge/types.hpp"

namespace scanforge {

/// Rewrites annotations for a corrupted cloud from provenance: points that
/// descend from a clean point (Original/Displaced) keep that point's label,
/// points with no clean ancestor (Scatterer/Injected) become `ignore`
/// (semantic 0, instance 0).
///
/// Throws IndexOutOfRange if a tag references an index >= clean label count.
LabelSet remap_labels(const LabelSet& clean_labels, const ProvenanceSet& prov);

/// Nearest-neighbour fallback for corrupted clouds that arrive without
/// provenance: each corrupted point takes the label of the nearest clean
/// point within `radius` meters, or `ignore` when none exists. Ties go to
/// the lowest clean index. Expected O(N) via a uniform grid with cell edge
/// equal to the radius.
///
/// Throws EmptyCleanCloud when the clean cloud has no points, and
/// InvalidArgument when radius <= 0.
LabelSet remap_labels_by_nn(const PointCloud& clean_cloud,
                            const LabelSet& clean_labels,
                            const PointCloud& corrupted_cloud, double radius);

}  // namespace scanforge
