// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scanforge/scan_io.hpp"
#include "scanforge/types.hpp"

namespace scanforge {

enum class CorruptionKind {
    Fog,
    Snow,
    GlobalOutliers,
    LocalDistortion,
    CrossDevice32,
    CrossDevice16,
};

/// Directory / manifest name of a corruption ("fog", "snow",
/// "global-outliers", "local-distortion", "cross-device-32",
/// "cross-device-16").
std::string kind_name(CorruptionKind kind);

/// One fully-specified corruption run: (kind, level, numeric parameters);
/// with a seed this determines every output byte.
struct CorruptionSetting {
    CorruptionKind kind = CorruptionKind::Fog;
    std::string level;  // light|moderate|heavy, dense|sparse, or custom

    double alpha = -1.0;  // fog; < 0 samples per scan from the level set
    double beta = 0.0;    // fog
    double rate = 0.0;    // snow, mm/h
    bool wet_ground = false;
    double ratio = 0.0;     // global outliers
    double sigma = 0.0;     // local distortion
    double fraction = 0.2;  // local distortion
    std::size_t target_beams = 0;  // cross-device
    bool sparse_azimuth = false;   // cross-device: also keep 1/2 per beam
    std::size_t azimuth_m = 2;     // cross-device sparse keep ratio 1/m
};

/// The benchmark's level -> parameter mapping. Throws InvalidArgument on an
/// unknown level for the kind.
CorruptionSetting setting_for(CorruptionKind kind, const std::string& level);

/// All 16 benchmark settings, in fixed order.
std::vector<CorruptionSetting> all_settings();

/// Per-scan seed rule: fnv1a64("<seed>:<kind>:<level>:<scan_id>"). Recorded
/// in every run manifest; makes outputs independent of scheduling.
std::uint64_t scan_seed(std::uint64_t global_seed, const CorruptionSetting& s,
                        const std::string& scan_id);

struct CorruptedScan {
    PointCloud cloud;
    LabelSet labels;
    ProvenanceSet prov;
};

/// Applies one setting to one labeled scan. `beams_in` is the beam count
/// used for zenith clustering when the setting needs beam structure (snow,
/// cross-device).
CorruptedScan apply_setting(const CorruptionSetting& setting,
                            const PointCloud& cloud, const LabelSet& labels,
                            std::uint64_t seed, std::size_t beams_in = 64);

/// second.src must index the outputs of first; returns provenance relative
/// to first's inputs.
ProvenanceSet compose_provenance(const ProvenanceSet& first,
                                 const ProvenanceSet& second);

struct RunOptions {
    std::uint64_t seed = 0;
    int workers = 0;  // 0 = OpenMP default
    std::size_t beams_in = 64;
    bool strict = false;
};

struct ScanFailure {
    std::string scan_id;
    std::string setting;
    std::string message;
};

struct RunResult {
    std::size_t scans_written = 0;
    std::vector<ScanFailure> failures;
};

/// Runs every setting over every manifest entry, writing
/// <out>/<kind>/<level>/<scan_id>.{bin,label,prov}. The run manifest
/// (run_manifest.json) is written before any scan is processed. With
/// strict, the first failure aborts the run; otherwise failures are
/// collected and reported in the result.
RunResult corrupt_dataset(const ScanManifest& manifest,
                          const std::vector<CorruptionSetting>& settings,
                          const std::filesystem::path& out_dir,
                          const RunOptions& options);

}  // namespace scanforge
