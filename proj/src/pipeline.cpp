// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "scanforge/pipeline.hpp"

#include <algorithm>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "scanforge/device.hpp"
#include "scanforge/labels.hpp"
#include "scanforge/noise.hpp"
#include "scanforge/rng.hpp"
#include "scanforge/version.hpp"
#include "scanforge/weather.hpp"

namespace scanforge {

std::string kind_name(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::Fog: return "fog";
        case CorruptionKind::Snow: return "snow";
        case CorruptionKind::GlobalOutliers: return "global-outliers";
        case CorruptionKind::LocalDistortion: return "local-distortion";
        case CorruptionKind::CrossDevice32: return "cross-device-32";
        case CorruptionKind::CrossDevice16: return "cross-device-16";
    }
    return "unknown";
}

CorruptionSetting setting_for(CorruptionKind kind, const std::string& level) {
    CorruptionSetting s;
    s.kind = kind;
    s.level = level;
    auto pick3 = [&](double light, double moderate, double heavy) {
        if (level == "light") return light;
        if (level == "moderate") return moderate;
        if (level == "heavy") return heavy;
        throw Error(ErrorCode::InvalidArgument,
                    "unknown level '" + level + "' for " + kind_name(kind));
    };
    switch (kind) {
        case CorruptionKind::Fog:
            s.beta = pick3(0.005, 0.06, 0.2);
            break;
        case CorruptionKind::Snow:
            s.rate = pick3(0.5, 1.5, 2.5);
            break;
        case CorruptionKind::GlobalOutliers:
            s.ratio = pick3(0.001, 0.05, 0.5);
            break;
        case CorruptionKind::LocalDistortion:
            s.sigma = pick3(0.05, 0.1, 0.2);
            s.fraction = 0.2;
            break;
        case CorruptionKind::CrossDevice32:
        case CorruptionKind::CrossDevice16:
            s.target_beams = kind == CorruptionKind::CrossDevice32 ? 32 : 16;
            if (level == "dense") {
                s.sparse_azimuth = false;
            } else if (level == "sparse") {
                s.sparse_azimuth = true;
            } else {
                throw Error(ErrorCode::InvalidArgument,
                            "unknown level '" + level + "' for " +
                                kind_name(kind));
            }
            break;
    }
    return s;
}

std::vector<CorruptionSetting> all_settings() {
    std::vector<CorruptionSetting> settings;
    for (const auto kind : {CorruptionKind::Fog, CorruptionKind::Snow,
                            CorruptionKind::GlobalOutliers,
                            CorruptionKind::LocalDistortion}) {
        for (const char* level : {"light", "moderate", "heavy"}) {
            settings.push_back(setting_for(kind, level));
        }
    }
    for (const auto kind :
         {CorruptionKind::CrossDevice32, CorruptionKind::CrossDevice16}) {
        for (const char* level : {"dense", "sparse"}) {
            settings.push_back(setting_for(kind, level));
        }
    }
    return settings;
}

std::uint64_t scan_seed(std::uint64_t global_seed, const CorruptionSetting& s,
                        const std::string& scan_id) {
    return fnv1a64(std::to_string(global_seed) + ":" + kind_name(s.kind) + ":" +
                   s.level + ":" + scan_id);
}

ProvenanceSet compose_provenance(const ProvenanceSet& first,
                                 const ProvenanceSet& second) {
    ProvenanceSet out;
    out.tags.resize(second.size());
    for (std::size_t i = 0; i < second.size(); ++i) {
        const ProvenanceTag& t = second[i];
        if (t.tag == Tag::Scatterer || t.tag == Tag::Injected) {
            out.tags[i] = t;
            continue;
        }
        if (t.src >= first.size()) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "composed provenance index out of range");
        }
        const ProvenanceTag& parent = first[t.src];
        if (parent.tag == Tag::Scatterer || parent.tag == Tag::Injected) {
            out.tags[i] = ProvenanceTag{parent.tag, 0};
        } else {
            // Displaced wins over Original when either hop moved the point.
            const Tag tag = (t.tag == Tag::Displaced ||
                             parent.tag == Tag::Displaced)
                                ? Tag::Displaced
                                : Tag::Original;
            out.tags[i] = ProvenanceTag{tag, parent.src};
        }
    }
    return out;
}

CorruptedScan apply_setting(const CorruptionSetting& setting,
                            const PointCloud& cloud, const LabelSet& labels,
                            std::uint64_t seed, std::size_t beams_in) {
    check_paired(cloud, labels);
    CorruptedScan result;
    switch (setting.kind) {
        case CorruptionKind::Fog: {
            FogParams params;
            params.alpha =
                setting.alpha < 0.0 ? sample_fog_alpha(seed) : setting.alpha;
            params.beta = setting.beta;
            params.seed = seed;
            auto [corrupted, prov] = apply_fog(cloud, params);
            result.cloud = std::move(corrupted);
            result.labels = remap_labels(labels, prov);
            result.prov = std::move(prov);
            break;
        }
        case CorruptionKind::Snow: {
            SnowParams params;
            params.rate_mm_h = setting.rate;
            params.wet_ground = setting.wet_ground;
            params.seed = seed;
            const BeamAssignment assignment =
                assign_beam_labels(cloud, beams_in);
            auto [corrupted, prov] =
                apply_snowfall(cloud, assignment.beam_of, params);
            result.cloud = std::move(corrupted);
            result.labels = remap_labels(labels, prov);
            result.prov = std::move(prov);
            break;
        }
        case CorruptionKind::GlobalOutliers: {
            OutlierParams params;
            params.ratio = setting.ratio;
            params.seed = seed;
            auto [corrupted, prov] = apply_global_outliers(cloud, params);
            result.cloud = std::move(corrupted);
            result.labels = remap_labels(labels, prov);
            result.prov = std::move(prov);
            break;
        }
        case CorruptionKind::LocalDistortion: {
            DistortionParams params;
            params.fraction = setting.fraction;
            params.sigma = setting.sigma;
            params.seed = seed;
            auto [corrupted, prov] = apply_local_distortion(cloud, params);
            result.cloud = std::move(corrupted);
            result.labels = remap_labels(labels, prov);
            result.prov = std::move(prov);
            break;
        }
        case CorruptionKind::CrossDevice32:
        case CorruptionKind::CrossDevice16: {
            const BeamAssignment assignment =
                assign_beam_labels(cloud, beams_in);
            auto [reduced_cloud, reduced_labels, reduce_prov] =
                reduce_beams(cloud, labels, assignment, setting.target_beams);
            if (!setting.sparse_azimuth) {
                result.cloud = std::move(reduced_cloud);
                result.labels = std::move(reduced_labels);
                result.prov = std::move(reduce_prov);
            } else {
                const BeamAssignment reduced_assignment =
                    restrict_assignment(assignment, reduce_prov);
                auto [sub_cloud, sub_labels, sub_prov] =
                    subsample_azimuth(reduced_cloud, reduced_labels,
                                      reduced_assignment, setting.azimuth_m);
                result.cloud = std::move(sub_cloud);
                result.labels = std::move(sub_labels);
                result.prov = compose_provenance(reduce_prov, sub_prov);
            }
            break;
        }
    }
    return result;
}

namespace {

nlohmann::json setting_to_json(const CorruptionSetting& s) {
    nlohmann::json e;
    e["kind"] = kind_name(s.kind);
    e["level"] = s.level;
    switch (s.kind) {
        case CorruptionKind::Fog:
            e["beta"] = s.beta;
            if (s.alpha >= 0.0) {
                e["alpha"] = s.alpha;
            } else {
                e["alpha"] = "sampled-per-scan";
            }
            break;
        case CorruptionKind::Snow:
            e["rate_mm_h"] = s.rate;
            e["wet_ground"] = s.wet_ground;
            break;
        case CorruptionKind::GlobalOutliers:
            e["ratio"] = s.ratio;
            break;
        case CorruptionKind::LocalDistortion:
            e["sigma"] = s.sigma;
            e["fraction"] = s.fraction;
            break;
        case CorruptionKind::CrossDevice32:
        case CorruptionKind::CrossDevice16:
            e["target_beams"] = s.target_beams;
            e["sparse"] = s.sparse_azimuth;
            if (s.sparse_azimuth) e["keep_ratio"] = "1/" + std::to_string(s.azimuth_m);
            break;
    }
    return e;
}

}  // namespace

RunResult corrupt_dataset(const ScanManifest& manifest,
                          const std::vector<CorruptionSetting>& settings,
                          const std::filesystem::path& out_dir,
                          const RunOptions& options) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    for (const auto& s : settings) {
        fs::create_directories(out_dir / kind_name(s.kind) / s.level);
    }

    {
        nlohmann::json run;
        run["toolkit_version"] = kVersion;
        run["schema_version"] = kManifestSchemaVersion;
        run["global_seed"] = options.seed;
        run["seed_rule"] = "fnv1a64('<seed>:<kind>:<level>:<scan_id>')";
        run["beams_in"] = options.beams_in;
        run["dataset_name"] = manifest.dataset_name;
        run["scan_count"] = manifest.entries.size();
        nlohmann::json list = nlohmann::json::array();
        for (const auto& s : settings) list.push_back(setting_to_json(s));
        run["settings"] = list;
        std::ofstream out(out_dir / "run_manifest.json");
        if (!out) {
            throw Error(ErrorCode::IoFailure, "cannot write run manifest");
        }
        out << run.dump(2) << "\n";
    }

    struct Task {
        const CorruptionSetting* setting;
        const ManifestEntry* entry;
    };
    std::vector<Task> tasks;
    for (const auto& s : settings) {
        for (const auto& e : manifest.entries) tasks.push_back(Task{&s, &e});
    }

    RunResult result;
    std::vector<std::string> errors(tasks.size());
    std::vector<char> ok(tasks.size(), 0);

#ifdef _OPENMP
    const int workers = options.workers > 0 ? options.workers : 0;
#pragma omp parallel for schedule(dynamic) if (tasks.size() > 1) \
    num_threads(workers > 0 ? workers : omp_get_max_threads())
#endif
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(tasks.size()); ++t) {
        const Task& task = tasks[static_cast<std::size_t>(t)];
        try {
            const PointCloud cloud = read_scan(task.entry->scan_path);
            const LabelSet labels = read_labels(task.entry->label_path);
            const std::uint64_t seed =
                scan_seed(options.seed, *task.setting, task.entry->scan_id);
            CorruptedScan corrupted = apply_setting(
                *task.setting, cloud, labels, seed, options.beams_in);
            const fs::path dir =
                out_dir / kind_name(task.setting->kind) / task.setting->level;
            write_scan(corrupted.cloud, dir / (task.entry->scan_id + ".bin"));
            write_labels(corrupted.labels,
                         dir / (task.entry->scan_id + ".label"));
            write_provenance(corrupted.prov,
                             dir / (task.entry->scan_id + ".prov"));
            ok[static_cast<std::size_t>(t)] = 1;
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(t)] = e.what();
        }
    }

    for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (ok[t]) {
            ++result.scans_written;
        } else {
            result.failures.push_back(
                ScanFailure{tasks[t].entry->scan_id,
                            kind_name(tasks[t].setting->kind) + "/" +
                                tasks[t].setting->level,
                            errors[t]});
        }
    }
    if (options.strict && !result.failures.empty()) {
        const ScanFailure& f = result.failures.front();
        throw Error(ErrorCode::IoFailure, "scan " + f.scan_id + " (" +
                                              f.setting + "): " + f.message);
    }
    return result;
}

}  // namespace scanforge
