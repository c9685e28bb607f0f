// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "scanforge/labels.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

namespace scanforge {

LabelSet remap_labels(const LabelSet& clean_labels, const ProvenanceSet& prov) {
    LabelSet out;
    out.labels.resize(prov.size());
    const std::size_t n_clean = clean_labels.size();
    for (std::size_t i = 0; i < prov.size(); ++i) {
        const ProvenanceTag& tag = prov[i];
        switch (tag.tag) {
            case Tag::Original:
            case Tag::Displaced:
                if (tag.src >= n_clean) {
                    throw Error(ErrorCode::IndexOutOfRange,
                                "provenance src " + std::to_string(tag.src) +
                                    " >= clean size " + std::to_string(n_clean));
                }
                out.labels[i] = clean_labels[tag.src];
                break;
            case Tag::Scatterer:
            case Tag::Injected:
                out.labels[i] = LabelSet::make(LabelSet::kIgnore, 0);
                break;
        }
    }
    return out;
}

namespace {

struct CellKey {
    std::int64_t x, y, z;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::int64_t v : {k.x, k.y, k.z}) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

inline CellKey cell_of(const Point& p, double inv_cell) {
    return CellKey{static_cast<std::int64_t>(std::floor(p.x * inv_cell)),
                   static_cast<std::int64_t>(std::floor(p.y * inv_cell)),
                   static_cast<std::int64_t>(std::floor(p.z * inv_cell))};
}

}  // namespace

LabelSet remap_labels_by_nn(const PointCloud& clean_cloud,
                            const LabelSet& clean_labels,
                            const PointCloud& corrupted_cloud, double radius) {
    if (clean_cloud.empty()) {
        throw Error(ErrorCode::EmptyCleanCloud, "clean cloud has no points");
    }
    if (!(radius > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "radius must be positive");
    }
    check_paired(clean_cloud, clean_labels);

    const double inv_cell = 1.0 / radius;
    std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> grid;
    grid.reserve(clean_cloud.size());
    for (std::size_t i = 0; i < clean_cloud.size(); ++i) {
        grid[cell_of(clean_cloud[i], inv_cell)].push_back(
            static_cast<std::uint32_t>(i));
    }

    const double r2 = radius * radius;
    LabelSet out;
    out.labels.resize(corrupted_cloud.size());

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0;
         i < static_cast<std::int64_t>(corrupted_cloud.size()); ++i) {
        const Point& q = corrupted_cloud[static_cast<std::size_t>(i)];
        const CellKey base = cell_of(q, inv_cell);
        double best_d2 = std::numeric_limits<double>::infinity();
        std::uint32_t best_idx = 0;
        bool found = false;
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy)
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    const auto it = grid.find(
                        CellKey{base.x + dx, base.y + dy, base.z + dz});
                    if (it == grid.end()) continue;
                    for (std::uint32_t ci : it->second) {
                        const Point& c = clean_cloud[ci];
                        const double ddx = q.x - c.x;
                        const double ddy = q.y - c.y;
                        const double ddz = q.z - c.z;
                        const double d2 = ddx * ddx + ddy * ddy + ddz * ddz;
                        if (d2 > r2) continue;
                        if (d2 < best_d2 || (d2 == best_d2 && ci < best_idx)) {
                            best_d2 = d2;
                            best_idx = ci;
                            found = true;
                        }
                    }
                }
        out.labels[static_cast<std::size_t>(i)] =
            found ? clean_labels[best_idx] : LabelSet::make(LabelSet::kIgnore, 0);
    }
    return out;
}

}  // namespace scanforge
