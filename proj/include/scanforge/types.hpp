// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scanforge {

/// One LiDAR return: sensor-ego Cartesian coordinates in meters plus the
/// return intensity in [0,1]. Matches the on-disk layout (4x f32, little
/// endian) exactly.
struct Point {
    float x = 0.f;
    float y = 0.f;
    float z = 0.f;
    float intensity = 0.f;

    float range() const { return std::sqrt(x * x + y * y + z * z); }
    float range_xy() const { return std::sqrt(x * x + y * y); }

    bool operator==(const Point&) const = default;
};

/// Ordered point set; iteration order is file order and is stable across
/// every operation in this library.
struct PointCloud {
    std::vector<Point> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    const Point& operator[](std::size_t i) const { return points[i]; }
    Point& operator[](std::size_t i) { return points[i]; }

    bool operator==(const PointCloud&) const = default;

    /// Largest distance from the sensor origin; 0 for an empty cloud.
    float max_range() const;
};

/// Per-point 32-bit annotation: low 16 bits semantic class, high 16 bits
/// instance id. Semantic class 0 is reserved as `ignore`/unlabeled.
struct LabelSet {
    std::vector<std::uint32_t> labels;

    static constexpr std::uint16_t kIgnore = 0;

    static std::uint16_t semantic(std::uint32_t label) {
        return static_cast<std::uint16_t>(label & 0xFFFFu);
    }
    static std::uint16_t instance(std::uint32_t label) {
        return static_cast<std::uint16_t>(label >> 16);
    }
    static std::uint32_t make(std::uint16_t semantic, std::uint16_t instance) {
        return static_cast<std::uint32_t>(instance) << 16 | semantic;
    }

    std::size_t size() const { return labels.size(); }
    std::uint32_t operator[](std::size_t i) const { return labels[i]; }

    bool operator==(const LabelSet&) const = default;
};

/// Origin of a corrupted point. Original/Displaced carry the index of the
/// clean point they come from; Scatterer/Injected have no clean ancestor.
enum class Tag : std::uint8_t {
    Original = 0,
    Displaced = 1,
    Scatterer = 2,
    Injected = 3,
};

struct ProvenanceTag {
    Tag tag = Tag::Original;
    std::uint32_t src = 0;  // valid for Original and Displaced only

    bool operator==(const ProvenanceTag&) const = default;
};

/// One tag per corrupted point, aligned with the corrupted cloud.
struct ProvenanceSet {
    std::vector<ProvenanceTag> tags;

    std::size_t size() const { return tags.size(); }
    const ProvenanceTag& operator[](std::size_t i) const { return tags[i]; }

    std::size_t count(Tag t) const;

    bool operator==(const ProvenanceSet&) const = default;
};

enum class ErrorCode {
    SizeNotMultipleOf16,
    SizeNotMultipleOf4,
    NonFinitePoint,
    IoFailure,
    BadManifest,
    LengthMismatch,
    DegenerateSpec,
    IndexOutOfRange,
    EmptyCleanCloud,
    EmptyCloud,
    MissingBeamIds,
    DegeneratePoint,
    TooFewPoints,
    IndivisibleBeamCount,
    DegenerateFov,
    DegenerateBounds,
    NoValidClasses,
    EmptyList,
    WrongCorruptionCount,
    ZeroCleanScore,
    NoInstancesFound,
    InvalidArgument,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

/// Throws LengthMismatch unless the label set is aligned 1:1 with the cloud.
/// Called at pairing time, before any corruption touches the pair.
void check_paired(const PointCloud& cloud, const LabelSet& labels);

}  // namespace scanforge
