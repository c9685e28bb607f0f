// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "scanforge/augment.hpp"
#include "scanforge/device.hpp"
#include "scanforge/labels.hpp"
#include "scanforge/metrics.hpp"
#include "scanforge/pipeline.hpp"
#include "scanforge/repr.hpp"
#include "scanforge/scan_io.hpp"
#include "scanforge/synth.hpp"
#include "scanforge/version.hpp"

namespace fs = std::filesystem;
using namespace scanforge;

namespace {

int env_workers() {
    if (const char* v = std::getenv("SCANFORGE_WORKERS")) {
        return std::atoi(v);
    }
    return 0;
}

CorruptionKind parse_kind(const std::string& name, std::size_t beams,
                          bool& is_cross_device) {
    is_cross_device = false;
    if (name == "fog") return CorruptionKind::Fog;
    if (name == "snow") return CorruptionKind::Snow;
    if (name == "global-outliers") return CorruptionKind::GlobalOutliers;
    if (name == "local-distortion") return CorruptionKind::LocalDistortion;
    if (name == "cross-device") {
        is_cross_device = true;
        if (beams == 32) return CorruptionKind::CrossDevice32;
        if (beams == 16) return CorruptionKind::CrossDevice16;
        throw Error(ErrorCode::InvalidArgument,
                    "--beams must be 32 or 16 for cross-device");
    }
    throw Error(ErrorCode::InvalidArgument, "unknown corruption '" + name + "'");
}

int cmd_corrupt(const std::string& manifest_path, const std::string& out_dir,
                bool run_all, const std::string& kind_name_arg,
                const std::string& level, std::uint64_t seed, bool strict,
                std::size_t beams_in, std::size_t beams,
                bool sparse, const std::string& keep_ratio,
                std::optional<double> alpha, std::optional<double> beta,
                std::optional<double> rate, std::optional<double> ratio,
                std::optional<double> sigma, std::optional<double> fraction,
                bool wet_ground) {
    const ScanManifest manifest = load_manifest(manifest_path);

    std::vector<CorruptionSetting> settings;
    if (run_all) {
        settings = all_settings();
    } else {
        bool is_cross_device = false;
        const CorruptionKind kind =
            parse_kind(kind_name_arg, beams, is_cross_device);
        const bool has_override = alpha || beta || rate || ratio || sigma ||
                                  fraction || !keep_ratio.empty();
        CorruptionSetting s;
        if (!level.empty() && has_override) {
            throw Error(ErrorCode::InvalidArgument,
                        "--level and numeric overrides are mutually exclusive");
        }
        if (!level.empty()) {
            s = setting_for(kind, level);
        } else if (has_override) {
            s.kind = kind;
            s.level = "custom";
            if (alpha) s.alpha = *alpha;
            if (beta) s.beta = *beta;
            if (rate) s.rate = *rate;
            if (ratio) s.ratio = *ratio;
            if (sigma) s.sigma = *sigma;
            if (fraction) s.fraction = *fraction;
            if (is_cross_device) {
                s.target_beams = beams;
                s.sparse_azimuth = sparse || !keep_ratio.empty();
                if (!keep_ratio.empty()) {
                    if (keep_ratio.rfind("1/", 0) != 0) {
                        throw Error(ErrorCode::InvalidArgument,
                                    "--keep-ratio must look like 1/m");
                    }
                    s.azimuth_m = std::stoul(keep_ratio.substr(2));
                }
            }
        } else {
            throw Error(ErrorCode::InvalidArgument,
                        "need --level or numeric overrides (or --all)");
        }
        if (is_cross_device && level.empty() && !has_override) {
            s.sparse_azimuth = sparse;
        }
        if (kind == CorruptionKind::Snow) s.wet_ground = wet_ground;
        settings.push_back(s);
    }

    RunOptions options;
    options.seed = seed;
    options.workers = env_workers();
    options.beams_in = beams_in;
    options.strict = strict;

    const RunResult result =
        corrupt_dataset(manifest, settings, out_dir, options);
    for (const auto& f : result.failures) {
        std::cerr << "error: " << f.setting << " " << f.scan_id << ": "
                  << f.message << "\n";
    }
    std::cout << "wrote " << result.scans_written << " corrupted scans ("
              << settings.size() << " settings x " << manifest.entries.size()
              << " scans) under " << out_dir << "\n";
    return result.failures.empty() ? 0 : 1;
}

int cmd_evaluate(const std::string& manifest_path, const std::string& gt_dir,
                 const std::string& pred_dir, const std::string& summary_path,
                 const std::string& report_path) {
    std::string report;
    if (!summary_path.empty()) {
        // Summary mode: robustness arithmetic over precomputed mIoUs.
        std::ifstream in(summary_path);
        if (!in) {
            throw Error(ErrorCode::IoFailure, "cannot open " + summary_path);
        }
        nlohmann::json doc;
        in >> doc;
        const double clean = doc.at("clean_miou").get<double>();
        std::vector<CorruptionResult> corruptions;
        for (const auto& [name, values] : doc.at("corruptions").items()) {
            CorruptionResult c;
            c.name = name;
            if (values.is_array()) {
                c.per_intensity = values.get<std::vector<double>>();
            } else {
                c.score = values.get<double>();
            }
            corruptions.push_back(std::move(c));
        }
        const RobustnessReport summary = robustness_summary(clean, corruptions);
        report = report_to_json(summary);
        std::cout.setf(std::ios::fixed);
        std::cout.precision(1);
        std::cout << "clean mIoU " << summary.clean_miou << "  RmIoU "
                  << summary.rmiou << "  mR " << summary.mr << "\n";
        for (const auto& c : summary.corruptions) {
            std::cout << "  " << c.name << ": S^c " << c.score << "  R^c "
                      << c.ratio << "\n";
        }
    } else {
        const ScanManifest manifest = load_manifest(manifest_path);
        std::uint16_t max_class = 1;
        for (const auto& [id, _] : manifest.class_names) {
            max_class = std::max(max_class, id);
        }
        ConfusionMatrix cm(static_cast<std::size_t>(max_class) + 1);
        for (const auto& entry : manifest.entries) {
            const LabelSet gt =
                read_labels(fs::path(gt_dir) / (entry.scan_id + ".label"));
            const LabelSet pred =
                read_labels(fs::path(pred_dir) / (entry.scan_id + ".label"));
            cm.accumulate(gt, pred);
        }
        report = iou_report_to_json(cm, manifest.class_names);
        std::cout.setf(std::ios::fixed);
        std::cout.precision(1);
        std::cout << "mIoU " << miou(cm) << " over " << manifest.entries.size()
                  << " scans\n";
    }
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) {
            throw Error(ErrorCode::IoFailure, "cannot write " + report_path);
        }
        out << report;
    }
    return 0;
}

int cmd_gen(const std::string& out_dir, int scans, int beams,
            int points_per_beam, double fov_up, double fov_down,
            double zenith_jitter, std::uint64_t seed) {
    fs::create_directories(fs::path(out_dir) / "scans");
    fs::create_directories(fs::path(out_dir) / "labels");

    ScanManifest manifest;
    manifest.dataset_name = "synthetic";
    manifest.class_names = {{0, "ignore"},   {1, "ground"}, {2, "box"},
                            {3, "pole"},     {9, "background"}};
    for (int i = 0; i < scans; ++i) {
        SceneSpec spec = default_scene(seed + static_cast<std::uint64_t>(i));
        spec.n_beams = beams;
        spec.points_per_beam = points_per_beam;
        spec.fov_up_deg = fov_up;
        spec.fov_down_deg = fov_down;
        spec.zenith_jitter_deg = zenith_jitter;
        const SynthScene scene = generate(spec);

        char id[16];
        std::snprintf(id, sizeof(id), "%06d", i);
        const fs::path scan_path = fs::path(out_dir) / "scans" /
                                   (std::string(id) + ".bin");
        const fs::path label_path = fs::path(out_dir) / "labels" /
                                    (std::string(id) + ".label");
        write_scan(scene.cloud, scan_path);
        write_labels(scene.labels, label_path);
        manifest.entries.push_back(ManifestEntry{id, fs::absolute(scan_path),
                                                 fs::absolute(label_path)});
    }
    save_manifest(manifest, fs::path(out_dir) / "manifest.json");
    std::cout << "generated " << scans << " scans ("
              << beams * points_per_beam << " points each) under " << out_dir
              << "\n";
    return 0;
}

int cmd_inspect(const std::string& scan_path, const std::string& repr,
                const std::string& size, const std::string& channel,
                double fov_up_deg, double fov_down_deg, double voxel,
                bool cylinder, bool no_normalize, bool planar_radius,
                const std::string& out_path) {
    const PointCloud cloud = read_scan(scan_path);
    std::size_t w = 1024, h = 64;
    if (!size.empty()) {
        const auto x = size.find('x');
        if (x == std::string::npos) {
            throw Error(ErrorCode::InvalidArgument, "--size must be WxH");
        }
        w = std::stoul(size.substr(0, x));
        h = std::stoul(size.substr(x + 1));
    }
    const RadiusMode mode =
        planar_radius ? RadiusMode::Planar : RadiusMode::FullNorm;
    constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

    if (repr == "range") {
        const RangeImage img =
            range_project(cloud, w, h, fov_up_deg * kDegToRad,
                          fov_down_deg * kDegToRad);
        const ImageChannel ch = channel == "intensity" ? ImageChannel::Intensity
                                                       : ImageChannel::Range;
        render_range_image(img, ch, out_path);
        std::size_t valid = 0;
        for (auto m : img.mask) valid += m;
        std::cout << "range image " << w << "x" << h << ", " << valid
                  << " valid pixels -> " << out_path << "\n";
    } else if (repr == "bev") {
        if (size.empty()) {
            w = 360;
            h = 480;
        }
        const BevImage img = polar_project(cloud, h, w, PolarBounds{}, mode);
        render_bev_counts(img, out_path);
        std::cout << "bev " << h << "x" << w << ", dropped " << img.dropped
                  << " points outside crop -> " << out_path << "\n";
    } else if (repr == "voxel") {
        VoxelizeOptions options;
        options.mode = cylinder ? VoxelizeOptions::Mode::Cylinder
                                : VoxelizeOptions::Mode::Grid;
        options.normalize = !no_normalize;
        options.radius_mode = mode;
        if (voxel > 0.0) {
            options.voxel_size = {voxel, voxel, voxel};
            if (cylinder) options.voxel_size[1] = 0.001 * 3.14159265358979323846;
        }
        const VoxelGrid grid = voxelize(cloud, options);
        nlohmann::json doc;
        doc["points"] = cloud.size();
        doc["non_empty_voxels"] = grid.cells.size();
        std::uint32_t max_count = 0;
        for (const auto& c : grid.cells) max_count = std::max(max_count, c.count);
        doc["max_points_per_voxel"] = max_count;
        doc["mode"] = cylinder ? "cylinder" : "grid";
        if (!out_path.empty()) {
            std::ofstream out(out_path);
            out << doc.dump(2) << "\n";
        }
        std::cout << doc.dump(2) << "\n";
    } else {
        throw Error(ErrorCode::InvalidArgument,
                    "--repr must be range, bev or voxel");
    }
    return 0;
}

int cmd_augment(const std::string& manifest_path, const std::string& out_dir,
                const std::string& kind, const std::string& classes_arg,
                std::uint64_t seed) {
    const ScanManifest manifest = load_manifest(manifest_path);
    if (manifest.entries.size() < 2) {
        throw Error(ErrorCode::InvalidArgument,
                    "augmentation pairs consecutive manifest entries; need >= 2");
    }
    fs::create_directories(fs::path(out_dir) / "scans");
    fs::create_directories(fs::path(out_dir) / "labels");

    std::set<std::uint16_t> classes;
    {
        std::string token;
        for (char c : classes_arg + ",") {
            if (c == ',') {
                if (!token.empty()) {
                    classes.insert(static_cast<std::uint16_t>(std::stoul(token)));
                }
                token.clear();
            } else {
                token += c;
            }
        }
    }

    ScanManifest out_manifest;
    out_manifest.dataset_name = manifest.dataset_name + "-" + kind;
    out_manifest.class_names = manifest.class_names;
    for (std::size_t i = 0; i + 1 < manifest.entries.size(); i += 2) {
        const auto& ea = manifest.entries[i];
        const auto& eb = manifest.entries[i + 1];
        const PointCloud ca = read_scan(ea.scan_path);
        const LabelSet la = read_labels(ea.label_path);
        const PointCloud cb = read_scan(eb.scan_path);
        const LabelSet lb = read_labels(eb.label_path);

        std::pair<PointCloud, LabelSet> merged;
        if (kind == "mix3d") {
            merged = mix3d(ca, la, cb, lb);
        } else if (kind == "cutmix") {
            Rng rng(substream(seed, stream_tag::kCutmix, i));
            merged = instance_cutmix(ca, la, cb, lb, classes, rng);
        } else {
            throw Error(ErrorCode::InvalidArgument,
                        "--kind must be mix3d or cutmix");
        }
        const std::string id = ea.scan_id + "_" + eb.scan_id;
        const fs::path scan_path =
            fs::path(out_dir) / "scans" / (id + ".bin");
        const fs::path label_path =
            fs::path(out_dir) / "labels" / (id + ".label");
        write_scan(merged.first, scan_path);
        write_labels(merged.second, label_path);
        out_manifest.entries.push_back(ManifestEntry{
            id, fs::absolute(scan_path), fs::absolute(label_path)});
    }
    save_manifest(out_manifest, fs::path(out_dir) / "manifest.json");
    std::cout << "wrote " << out_manifest.entries.size() << " " << kind
              << " scans under " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LiDAR corruption benchmark toolkit"};
    app.set_version_flag(
        "--version",
        std::string("scanforge ") + kVersion + " (manifest schema " +
            std::to_string(kManifestSchemaVersion) + ")");
    app.require_subcommand(1);

    // corrupt
    auto* corrupt = app.add_subcommand(
        "corrupt", "apply corruptions to every scan in a manifest");
    std::string manifest_path, out_dir, kind, level, keep_ratio;
    bool run_all = false, strict = false, sparse = false, wet_ground = false;
    std::uint64_t seed = 0;
    std::size_t beams_in = 64, beams = 0;
    std::optional<double> alpha, beta, rate, ratio, sigma, fraction;
    corrupt->add_option("--manifest", manifest_path)->required();
    corrupt->add_option("--out", out_dir)->required();
    corrupt->add_flag("--all", run_all, "run all 16 benchmark settings");
    corrupt->add_option("--kind", kind,
                        "fog|snow|global-outliers|local-distortion|cross-device");
    corrupt->add_option("--level", level, "light|moderate|heavy or dense|sparse");
    corrupt->add_option("--seed", seed);
    corrupt->add_flag("--strict", strict, "abort on the first failed scan");
    corrupt->add_option("--beams-in", beams_in,
                        "beam count of the input device (zenith clustering)");
    corrupt->add_option("--beams", beams, "cross-device target: 32 or 16");
    corrupt->add_flag("--sparse", sparse, "cross-device: also keep 1/2 per beam");
    corrupt->add_option("--keep-ratio", keep_ratio,
                        "cross-device azimuth keep ratio, e.g. 1/4");
    corrupt->add_option("--alpha", alpha, "fog attenuation coefficient");
    corrupt->add_option("--beta", beta, "fog backscattering coefficient");
    corrupt->add_option("--rate", rate, "snowfall rate, mm/h");
    corrupt->add_option("--ratio", ratio, "global outlier fraction");
    corrupt->add_option("--sigma", sigma, "distortion std, meters");
    corrupt->add_option("--fraction", fraction, "distortion point fraction");
    corrupt->add_flag("--wet-ground", wet_ground, "snow: damp near-ground returns");

    // evaluate
    auto* evaluate = app.add_subcommand(
        "evaluate", "score predictions (pair mode) or aggregate robustness "
                    "(summary mode)");
    std::string gt_dir, pred_dir, summary_path, report_path, eval_manifest;
    evaluate->add_option("--manifest", eval_manifest);
    evaluate->add_option("--gt-dir", gt_dir);
    evaluate->add_option("--pred-dir", pred_dir);
    evaluate->add_option("--summary", summary_path,
                         "JSON with clean_miou and per-corruption scores");
    evaluate->add_option("--report", report_path, "write the JSON report here");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic labeled dataset");
    std::string gen_out;
    int gen_scans = 3, gen_beams = 64, gen_ppb = 1863;
    double gen_fov_up = 3.0, gen_fov_down = -25.0, gen_jitter = 0.0;
    std::uint64_t gen_seed = 0;
    gen->add_option("--out", gen_out)->required();
    gen->add_option("--scans", gen_scans);
    gen->add_option("--beams", gen_beams);
    gen->add_option("--points-per-beam", gen_ppb);
    gen->add_option("--fov-up", gen_fov_up);
    gen->add_option("--fov-down", gen_fov_down);
    gen->add_option("--zenith-jitter", gen_jitter, "degrees");
    gen->add_option("--seed", gen_seed);

    // inspect
    auto* inspect = app.add_subcommand("inspect", "render a representation");
    std::string ins_scan, ins_repr = "range", ins_size, ins_channel = "range";
    std::string ins_out = "out.pgm";
    double ins_fov_up = 3.0, ins_fov_down = -25.0, ins_voxel = 0.0;
    bool ins_cyl = false, ins_nonorm = false, ins_planar = false;
    inspect->add_option("--scan", ins_scan)->required();
    inspect->add_option("--repr", ins_repr, "range|bev|voxel");
    inspect->add_option("--size", ins_size, "WxH");
    inspect->add_option("--channel", ins_channel, "range|intensity");
    inspect->add_option("--fov-up", ins_fov_up, "degrees");
    inspect->add_option("--fov-down", ins_fov_down, "degrees");
    inspect->add_option("--voxel-size", ins_voxel);
    inspect->add_flag("--cylinder", ins_cyl);
    inspect->add_flag("--no-normalize", ins_nonorm);
    inspect->add_flag("--planar-radius", ins_planar);
    inspect->add_option("--out", ins_out);

    // augment
    auto* augment = app.add_subcommand(
        "augment", "mix scan pairs (mix3d) or paste instances (cutmix)");
    std::string aug_manifest, aug_out, aug_kind = "mix3d", aug_classes = "2,3";
    std::uint64_t aug_seed = 0;
    augment->add_option("--manifest", aug_manifest)->required();
    augment->add_option("--out", aug_out)->required();
    augment->add_option("--kind", aug_kind, "mix3d|cutmix");
    augment->add_option("--classes", aug_classes,
                        "instance classes for cutmix, comma separated");
    augment->add_option("--seed", aug_seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (corrupt->parsed()) {
            return cmd_corrupt(manifest_path, out_dir, run_all, kind, level,
                               seed, strict, beams_in, beams, sparse,
                               keep_ratio, alpha, beta, rate, ratio, sigma,
                               fraction, wet_ground);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(eval_manifest, gt_dir, pred_dir, summary_path,
                                report_path);
        }
        if (gen->parsed()) {
            return cmd_gen(gen_out, gen_scans, gen_beams, gen_ppb, gen_fov_up,
                           gen_fov_down, gen_jitter, gen_seed);
        }
        if (inspect->parsed()) {
            return cmd_inspect(ins_scan, ins_repr, ins_size, ins_channel,
                               ins_fov_up, ins_fov_down, ins_voxel, ins_cyl,
                               ins_nonorm, ins_planar, ins_out);
        }
        if (augment->parsed()) {
            return cmd_augment(aug_manifest, aug_out, aug_kind, aug_classes,
                               aug_seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
