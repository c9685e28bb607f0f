// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "scanforge/scan_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace scanforge {

namespace {

using nlohmann::json;

std::vector<char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    }
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<char> bytes(size);
    if (size > 0 && !in.read(bytes.data(), static_cast<std::streamsize>(size))) {
        throw Error(ErrorCode::IoFailure, "short read on " + path.string());
    }
    return bytes;
}

void write_file(const std::filesystem::path& path, const void* data,
                std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string() +
                                              " for writing");
    }
    if (size > 0) {
        out.write(static_cast<const char*>(data),
                  static_cast<std::streamsize>(size));
    }
    if (!out) {
        throw Error(ErrorCode::IoFailure, "short write on " + path.string());
    }
}

inline float load_f32_le(const char* p) {
    std::uint32_t u;
    std::memcpy(&u, p, 4);
    if constexpr (std::endian::native == std::endian::big) {
        u = __builtin_bswap32(u);
    }
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

inline void store_f32_le(char* p, float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    if constexpr (std::endian::native == std::endian::big) {
        u = __builtin_bswap32(u);
    }
    std::memcpy(p, &u, 4);
}

inline std::uint32_t load_u32_le(const char* p) {
    std::uint32_t u;
    std::memcpy(&u, p, 4);
    if constexpr (std::endian::native == std::endian::big) {
        u = __builtin_bswap32(u);
    }
    return u;
}

inline void store_u32_le(char* p, std::uint32_t u) {
    if constexpr (std::endian::native == std::endian::big) {
        u = __builtin_bswap32(u);
    }
    std::memcpy(p, &u, 4);
}

}  // namespace

float PointCloud::max_range() const {
    float best = 0.f;
    for (const Point& p : points) best = std::max(best, p.range());
    return best;
}

std::size_t ProvenanceSet::count(Tag t) const {
    return static_cast<std::size_t>(
        std::count_if(tags.begin(), tags.end(),
                      [t](const ProvenanceTag& p) { return p.tag == t; }));
}

void check_paired(const PointCloud& cloud, const LabelSet& labels) {
    if (cloud.size() != labels.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    "label count " + std::to_string(labels.size()) +
                        " does not match point count " +
                        std::to_string(cloud.size()));
    }
}

PointCloud read_scan(const std::filesystem::path& path, std::size_t* clamped) {
    const std::vector<char> bytes = read_file(path);
    if (bytes.size() % 16 != 0) {
        throw Error(ErrorCode::SizeNotMultipleOf16,
                    path.string() + ": size " + std::to_string(bytes.size()) +
                        " is not a multiple of 16");
    }
    const std::size_t n = bytes.size() / 16;
    PointCloud cloud;
    cloud.points.resize(n);
    std::size_t clamp_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const char* rec = bytes.data() + i * 16;
        Point& p = cloud.points[i];
        p.x = load_f32_le(rec);
        p.y = load_f32_le(rec + 4);
        p.z = load_f32_le(rec + 8);
        p.intensity = load_f32_le(rec + 12);
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
            !std::isfinite(p.intensity)) {
            throw Error(ErrorCode::NonFinitePoint,
                        path.string() + ": non-finite value at point " +
                            std::to_string(i));
        }
        if (p.intensity < 0.f || p.intensity > 1.f) {
            p.intensity = std::clamp(p.intensity, 0.f, 1.f);
            ++clamp_count;
        }
    }
    if (clamped) *clamped = clamp_count;
    return cloud;
}

void write_scan(const PointCloud& cloud, const std::filesystem::path& path) {
    std::vector<char> bytes(cloud.size() * 16);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        char* rec = bytes.data() + i * 16;
        const Point& p = cloud.points[i];
        store_f32_le(rec, p.x);
        store_f32_le(rec + 4, p.y);
        store_f32_le(rec + 8, p.z);
        store_f32_le(rec + 12, p.intensity);
    }
    write_file(path, bytes.data(), bytes.size());
}

LabelSet read_labels(const std::filesystem::path& path) {
    const std::vector<char> bytes = read_file(path);
    if (bytes.size() % 4 != 0) {
        throw Error(ErrorCode::SizeNotMultipleOf4,
                    path.string() + ": size " + std::to_string(bytes.size()) +
                        " is not a multiple of 4");
    }
    LabelSet set;
    set.labels.resize(bytes.size() / 4);
    for (std::size_t i = 0; i < set.labels.size(); ++i) {
        set.labels[i] = load_u32_le(bytes.data() + i * 4);
    }
    return set;
}

void write_labels(const LabelSet& labels, const std::filesystem::path& path) {
    std::vector<char> bytes(labels.size() * 4);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        store_u32_le(bytes.data() + i * 4, labels.labels[i]);
    }
    write_file(path, bytes.data(), bytes.size());
}

ProvenanceSet read_provenance(const std::filesystem::path& path) {
    const std::vector<char> bytes = read_file(path);
    ProvenanceSet prov;
    prov.tags.resize(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const auto v = static_cast<std::uint8_t>(bytes[i]);
        if (v > static_cast<std::uint8_t>(Tag::Injected)) {
            throw Error(ErrorCode::IoFailure,
                        path.string() + ": invalid tag byte at " +
                            std::to_string(i));
        }
        prov.tags[i].tag = static_cast<Tag>(v);
    }
    return prov;
}

void write_provenance(const ProvenanceSet& prov,
                      const std::filesystem::path& path) {
    std::vector<char> bytes(prov.size());
    for (std::size_t i = 0; i < prov.size(); ++i) {
        bytes[i] = static_cast<char>(prov.tags[i].tag);
    }
    write_file(path, bytes.data(), bytes.size());
}

ScanManifest load_manifest(const std::filesystem::path& path) {
    json doc;
    {
        std::ifstream in(path);
        if (!in) {
            throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
        }
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw Error(ErrorCode::BadManifest,
                        path.string() + ": " + e.what());
        }
    }
    const auto base = std::filesystem::absolute(path).parent_path();
    ScanManifest m;
    try {
        m.dataset_name = doc.value("dataset_name", "");
        if (doc.contains("class_names")) {
            for (const auto& [key, value] : doc.at("class_names").items()) {
                m.class_names[static_cast<std::uint16_t>(std::stoul(key))] =
                    value.get<std::string>();
            }
        }
        for (const auto& e : doc.at("entries")) {
            ManifestEntry entry;
            entry.scan_id = e.at("scan_id").get<std::string>();
            entry.scan_path = base / e.at("scan_path").get<std::string>();
            entry.label_path = base / e.at("label_path").get<std::string>();
            m.entries.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadManifest, path.string() + ": " + e.what());
    }
    std::vector<std::string> ids;
    for (const auto& e : m.entries) {
        ids.push_back(e.scan_id);
        if (!std::filesystem::exists(e.scan_path)) {
            throw Error(ErrorCode::BadManifest,
                        "missing scan file " + e.scan_path.string());
        }
        if (!std::filesystem::exists(e.label_path)) {
            throw Error(ErrorCode::BadManifest,
                        "missing label file " + e.label_path.string());
        }
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw Error(ErrorCode::BadManifest, "duplicate scan_id in manifest");
    }
    return m;
}

void save_manifest(const ScanManifest& manifest,
                   const std::filesystem::path& path) {
    const auto base = std::filesystem::absolute(path).parent_path();
    json doc;
    doc["dataset_name"] = manifest.dataset_name;
    json classes = json::object();
    for (const auto& [id, name] : manifest.class_names) {
        classes[std::to_string(id)] = name;
    }
    doc["class_names"] = classes;
    json entries = json::array();
    for (const auto& e : manifest.entries) {
        json entry;
        entry["scan_id"] = e.scan_id;
        entry["scan_path"] = e.scan_path.lexically_relative(base).generic_string();
        entry["label_path"] =
            e.label_path.lexically_relative(base).generic_string();
        entries.push_back(entry);
    }
    doc["entries"] = entries;
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoFailure,
                    "cannot open " + path.string() + " for writing");
    }
    out << doc.dump(2) << "\n";
}

}  // namespace scanforge
