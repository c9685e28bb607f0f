// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "scanforge/types.hpp"

namespace scanforge {

/// Reads a KITTI Velodyne scan: N x 16 bytes of little-endian f32
/// (x, y, z, intensity). Intensities outside [0,1] are clamped; the clamp
/// count is surfaced through `clamped` when non-null.
///
/// Throws SizeNotMultipleOf16 on truncated files and NonFinitePoint (with
/// the offending index in the message) on NaN/Inf values.
PointCloud read_scan(const std::filesystem::path& path,
                     std::size_t* clamped = nullptr);

/// Writes the exact inverse of read_scan; read_scan(write_scan(c)) == c
/// byte for byte.
void write_scan(const PointCloud& cloud, const std::filesystem::path& path);

/// Reads a SemanticKITTI label file: N x 4 bytes of little-endian u32.
LabelSet read_labels(const std::filesystem::path& path);

void write_labels(const LabelSet& labels, const std::filesystem::path& path);

/// Provenance sidecar: one byte per point (the Tag enum value).
ProvenanceSet read_provenance(const std::filesystem::path& path);
void write_provenance(const ProvenanceSet& prov,
                      const std::filesystem::path& path);

struct ManifestEntry {
    std::string scan_id;
    std::filesystem::path scan_path;   // resolved, absolute
    std::filesystem::path label_path;  // resolved, absolute
};

/// Dataset manifest (JSON). Relative paths are resolved against the
/// manifest's own directory. Schema:
///
///   {
///     "dataset_name": "...",
///     "class_names": {"0": "ignore", "1": "ground", ...},
///     "entries": [
///       {"scan_id": "000000",
///        "scan_path": "scans/000000.bin",
///        "label_path": "labels/000000.label"}
///     ]
///   }
struct ScanManifest {
    std::string dataset_name;
    std::map<std::uint16_t, std::string> class_names;
    std::vector<ManifestEntry> entries;
};

/// Loads and validates a manifest: scan ids must be unique and every
/// referenced path must exist. Throws BadManifest otherwise.
ScanManifest load_manifest(const std::filesystem::path& path);

/// Writes a manifest with paths stored relative to the manifest directory.
void save_manifest(const ScanManifest& manifest,
                   const std::filesystem::path& path);

}  // namespace scanforge
