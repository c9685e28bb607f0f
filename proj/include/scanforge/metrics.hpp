// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scanforge/types.hpp"

namespace scanforge {

/// Confusion counts over semantic classes 1..K-1 (class 0 is `ignore`).
/// Points whose ground truth is `ignore` contribute nothing; predictions of
/// class 0 on valid points land in the reserved column 0 and count as
/// misclassifications.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t num_classes);

    std::size_t num_classes() const { return num_classes_; }

    std::uint64_t at(std::uint16_t gt, std::uint16_t pred) const {
        return counts_[gt * num_classes_ + pred];
    }

    /// Tallies one gt/pred label pair (semantic parts only).
    void add(std::uint32_t gt_label, std::uint32_t pred_label);

    /// Tallies two aligned label sets; throws LengthMismatch.
    void accumulate(const LabelSet& gt, const LabelSet& pred);

    /// Associative merge for parallel per-scan accumulation.
    ConfusionMatrix& operator+=(const ConfusionMatrix& other);

    std::uint64_t row_sum(std::uint16_t gt) const;
    std::uint64_t col_sum(std::uint16_t pred) const;

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t num_classes_;
    std::vector<std::uint64_t> counts_;  // [gt * num_classes + pred]
};

/// Per-class IoU in percent; classes absent from the ground truth are
/// nullopt and excluded from the mean.
std::vector<std::optional<double>> per_class_iou(const ConfusionMatrix& cm);

/// Mean IoU in percent over classes present in the ground truth.
/// Throws NoValidClasses when no class has ground-truth points.
double miou(const ConfusionMatrix& cm);

/// Mean of the per-intensity mIoUs for one corruption. Throws EmptyList.
double corruption_score(const std::vector<double>& per_intensity);

struct CorruptionResult {
    std::string name;
    std::vector<double> per_intensity;  // S^c_i, percent
    double score = 0.0;                 // S^c
    double ratio = 0.0;                 // R^c = S^c / S, percent
};

struct RobustnessReport {
    double clean_miou = 0.0;  // S
    std::vector<CorruptionResult> corruptions;
    double rmiou = 0.0;  // mean of the six S^c
    double mr = 0.0;     // RmIoU / S, percent
};

/// Aggregates exactly six per-corruption scores into RmIoU and mR.
/// Throws WrongCorruptionCount / ZeroCleanScore.
RobustnessReport robustness_summary(
    double clean_miou, const std::vector<CorruptionResult>& corruptions);

/// Convenience for the six bare S^c values.
RobustnessReport robustness_summary(double clean_miou,
                                    const std::vector<double>& scores);

/// Report serialization for the evaluate CLI; class_names may be empty.
std::string report_to_json(const RobustnessReport& report);
std::string iou_report_to_json(
    const ConfusionMatrix& cm,
    const std::map<std::uint16_t, std::string>& class_names);

}  // namespace scanforge
