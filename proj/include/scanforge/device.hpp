// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

#include "scanforge/types.hpp"

namespace scanforge {

/// Zenith/azimuth of a point in the sensor frame:
/// theta = arctan(z / sqrt(x^2+y^2)), phi = atan2(y, x) (full quadrant).
/// Throws DegeneratePoint when x = y = 0 (phi undefined; at the origin
/// theta is too).
std::pair<double, double> spherical_angles(const Point& p);

struct BeamAssignment {
    std::vector<std::uint16_t> beam_of;  // per point, in [0, k)
    std::vector<double> centers;         // k zenith angles, strictly ascending

    std::size_t beam_count() const { return centers.size(); }
};

/// 1-D Lloyd K-Means over per-point zenith angles. Deterministic: centers
/// start at the k evenly spaced quantiles of the sorted zeniths; empty
/// clusters are re-seeded to the zenith farthest from its current center
/// (ties to the lowest point index); iteration stops when no assignment
/// changes or after 100 rounds. Throws TooFewPoints when N < k and
/// TooFewPoints when fewer than k distinct zenith values exist.
BeamAssignment assign_beam_labels(const PointCloud& cloud, std::size_t k);

/// As above, also recording the clustering objective once per Lloyd round.
BeamAssignment assign_beam_labels(const PointCloud& cloud, std::size_t k,
                                  std::vector<double>* objective_trace);

/// Within-cluster zenith variance of an assignment; the Lloyd objective.
double beam_objective(const PointCloud& cloud, const BeamAssignment& assignment);

/// Keeps every (64/target)-th beam, counting from the highest zenith ring
/// (beam 0 = top). Kept points are unchanged and keep file order; labels
/// carry over; provenance tags them Original with their source index.
/// Throws IndivisibleBeamCount unless target divides the beam count.
std::tuple<PointCloud, LabelSet, ProvenanceSet> reduce_beams(
    const PointCloud& cloud, const LabelSet& labels,
    const BeamAssignment& assignment, std::size_t target);

/// Keeps every m-th point of each beam in azimuth order (keep_ratio = 1/m):
/// per-beam kept count is ceil(n_b / m). Kept points keep file order.
std::tuple<PointCloud, LabelSet, ProvenanceSet> subsample_azimuth(
    const PointCloud& cloud, const LabelSet& labels,
    const BeamAssignment& assignment, std::size_t m);

/// Restricts an assignment to the points a provenance-tagged subsampling
/// kept, preserving center angles that still have members.
BeamAssignment restrict_assignment(const BeamAssignment& assignment,
                                   const ProvenanceSet& prov);

}  // namespace scanforge
