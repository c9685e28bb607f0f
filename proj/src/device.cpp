// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "scanforge/device.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scanforge {

std::pair<double, double> spherical_angles(const Point& p) {
    const double rxy = std::sqrt(static_cast<double>(p.x) * p.x +
                                 static_cast<double>(p.y) * p.y);
    if (rxy == 0.0) {
        throw Error(ErrorCode::DegeneratePoint,
                    "azimuth undefined for x = y = 0");
    }
    return {std::atan2(static_cast<double>(p.z), rxy),
            std::atan2(static_cast<double>(p.y), static_cast<double>(p.x))};
}

namespace {

// Zenith for the batch paths; poles and the origin take the atan2 limits
// instead of throwing (a single degenerate return must not abort a scan).
inline double zenith_of(const Point& p) {
    return std::atan2(static_cast<double>(p.z),
                      std::sqrt(static_cast<double>(p.x) * p.x +
                                static_cast<double>(p.y) * p.y));
}

inline double azimuth_of(const Point& p) {
    return std::atan2(static_cast<double>(p.y), static_cast<double>(p.x));
}

std::tuple<PointCloud, LabelSet, ProvenanceSet> filter_points(
    const PointCloud& cloud, const LabelSet& labels,
    const std::vector<char>& keep) {
    PointCloud out_cloud;
    LabelSet out_labels;
    ProvenanceSet prov;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (!keep[i]) continue;
        out_cloud.points.push_back(cloud[i]);
        out_labels.labels.push_back(labels[i]);
        prov.tags.push_back(
            ProvenanceTag{Tag::Original, static_cast<std::uint32_t>(i)});
    }
    return {std::move(out_cloud), std::move(out_labels), std::move(prov)};
}

}  // namespace

BeamAssignment assign_beam_labels(const PointCloud& cloud, std::size_t k) {
    return assign_beam_labels(cloud, k, nullptr);
}

BeamAssignment assign_beam_labels(const PointCloud& cloud, std::size_t k,
                                  std::vector<double>* objective_trace) {
    const std::size_t n = cloud.size();
    if (k < 1 || n < k) {
        throw Error(ErrorCode::TooFewPoints,
                    "need at least k = " + std::to_string(k) + " points, have " +
                        std::to_string(n));
    }

    std::vector<double> theta(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        theta[static_cast<std::size_t>(i)] =
            zenith_of(cloud[static_cast<std::size_t>(i)]);
    }

    // Work in the sorted domain: clusters of a 1-D K-Means are contiguous
    // runs, so assignment reduces to k-1 boundary positions.
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return theta[a] < theta[b] || (theta[a] == theta[b] && a < b);
    });
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = theta[order[i]];

    std::vector<double> distinct(sorted);
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    if (distinct.size() < k) {
        throw Error(ErrorCode::TooFewPoints,
                    "only " + std::to_string(distinct.size()) +
                        " distinct zenith values for k = " + std::to_string(k));
    }

    // Evenly spaced quantiles of the de-duplicated zeniths; strictly
    // increasing by construction, no RNG involved.
    std::vector<double> centers(k);
    for (std::size_t j = 0; j < k; ++j) {
        centers[j] = distinct[(2 * j + 1) * distinct.size() / (2 * k)];
    }

    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sorted[i];

    auto assign_bounds = [&](const std::vector<double>& c) {
        // bounds[j] = first sorted index belonging to cluster j+1.
        std::vector<std::size_t> bounds(k + 1, n);
        bounds[0] = 0;
        for (std::size_t j = 0; j + 1 < k; ++j) {
            const double mid = 0.5 * (c[j] + c[j + 1]);
            // Ties at the exact midpoint go to the lower cluster.
            bounds[j + 1] = static_cast<std::size_t>(
                std::upper_bound(sorted.begin(), sorted.end(), mid) -
                sorted.begin());
            bounds[j + 1] = std::max(bounds[j + 1], bounds[j]);
        }
        bounds[k] = n;
        return bounds;
    };

    std::vector<std::size_t> bounds = assign_bounds(centers);
    if (objective_trace) objective_trace->clear();

    for (int iter = 0; iter < 100; ++iter) {
        if (objective_trace) {
            double obj = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                for (std::size_t i = bounds[j]; i < bounds[j + 1]; ++i) {
                    const double d = sorted[i] - centers[j];
                    obj += d * d;
                }
            }
            objective_trace->push_back(obj);
        }

        bool reseeded = false;
        std::vector<double> next(k);
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t lo = bounds[j], hi = bounds[j + 1];
            if (hi > lo) {
                next[j] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
            } else {
                // Empty cluster: move it onto the zenith farthest from its
                // own center; ties resolved by the lowest original index.
                double best_d = -1.0;
                std::uint32_t best_src = 0;
                double best_theta = centers[j];
                for (std::size_t jj = 0; jj < k; ++jj) {
                    for (std::size_t i = bounds[jj]; i < bounds[jj + 1]; ++i) {
                        const double d = std::abs(sorted[i] - centers[jj]);
                        if (d > best_d ||
                            (d == best_d && order[i] < best_src)) {
                            best_d = d;
                            best_src = order[i];
                            best_theta = sorted[i];
                        }
                    }
                }
                next[j] = best_theta;
                reseeded = true;
            }
        }
        std::sort(next.begin(), next.end());
        const std::vector<std::size_t> next_bounds = assign_bounds(next);
        const bool converged = !reseeded && next_bounds == bounds;
        centers = std::move(next);
        bounds = next_bounds;
        if (converged) break;
    }

    BeamAssignment result;
    result.centers = centers;
    result.beam_of.resize(n);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = bounds[j]; i < bounds[j + 1]; ++i) {
            result.beam_of[order[i]] = static_cast<std::uint16_t>(j);
        }
    }
    return result;
}

double beam_objective(const PointCloud& cloud,
                      const BeamAssignment& assignment) {
    double obj = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double d =
            zenith_of(cloud[i]) - assignment.centers[assignment.beam_of[i]];
        obj += d * d;
    }
    return obj;
}

std::tuple<PointCloud, LabelSet, ProvenanceSet> reduce_beams(
    const PointCloud& cloud, const LabelSet& labels,
    const BeamAssignment& assignment, std::size_t target) {
    check_paired(cloud, labels);
    const std::size_t k = assignment.beam_count();
    if (target < 1 || k % target != 0) {
        throw Error(ErrorCode::IndivisibleBeamCount,
                    std::to_string(k) + " beams cannot be reduced to " +
                        std::to_string(target));
    }
    const std::size_t stride = k / target;

    // Beam 0 is the highest ring: selection counts from the top down.
    std::vector<char> beam_kept(k, 0);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t rank_from_top = k - 1 - j;  // centers are ascending
        beam_kept[j] = rank_from_top % stride == 0;
    }
    std::vector<char> keep(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        keep[i] = beam_kept[assignment.beam_of[i]];
    }
    return filter_points(cloud, labels, keep);
}

std::tuple<PointCloud, LabelSet, ProvenanceSet> subsample_azimuth(
    const PointCloud& cloud, const LabelSet& labels,
    const BeamAssignment& assignment, std::size_t m) {
    check_paired(cloud, labels);
    if (m < 1) {
        throw Error(ErrorCode::InvalidArgument, "keep ratio must be 1/m, m >= 1");
    }
    const std::size_t k = assignment.beam_count();
    std::vector<std::vector<std::uint32_t>> members(k);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        members[assignment.beam_of[i]].push_back(static_cast<std::uint32_t>(i));
    }
    std::vector<char> keep(cloud.size(), 0);
    for (auto& beam : members) {
        std::sort(beam.begin(), beam.end(),
                  [&](std::uint32_t a, std::uint32_t b) {
                      const double pa = azimuth_of(cloud[a]);
                      const double pb = azimuth_of(cloud[b]);
                      return pa < pb || (pa == pb && a < b);
                  });
        for (std::size_t r = 0; r < beam.size(); r += m) keep[beam[r]] = 1;
    }
    return filter_points(cloud, labels, keep);
}

BeamAssignment restrict_assignment(const BeamAssignment& assignment,
                                   const ProvenanceSet& prov) {
    std::vector<char> used(assignment.beam_count(), 0);
    for (const ProvenanceTag& t : prov.tags) used[assignment.beam_of[t.src]] = 1;

    std::vector<std::uint16_t> remap(assignment.beam_count(), 0);
    BeamAssignment out;
    for (std::size_t j = 0; j < assignment.beam_count(); ++j) {
        if (!used[j]) continue;
        remap[j] = static_cast<std::uint16_t>(out.centers.size());
        out.centers.push_back(assignment.centers[j]);
    }
    out.beam_of.reserve(prov.size());
    for (const ProvenanceTag& t : prov.tags) {
        out.beam_of.push_back(remap[assignment.beam_of[t.src]]);
    }
    return out;
}

}  // namespace scanforge
