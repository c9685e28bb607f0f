// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "scanforge/metrics.hpp"

#include <numeric>

#include <json.hpp>

namespace scanforge {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes)
    : num_classes_(num_classes), counts_(num_classes * num_classes, 0) {
    if (num_classes < 2) {
        throw Error(ErrorCode::InvalidArgument,
                    "need at least one valid class besides `ignore`");
    }
}

void ConfusionMatrix::add(std::uint32_t gt_label, std::uint32_t pred_label) {
    const std::uint16_t gt = LabelSet::semantic(gt_label);
    if (gt == LabelSet::kIgnore) return;
    const std::uint16_t pred = LabelSet::semantic(pred_label);
    if (gt >= num_classes_ || pred >= num_classes_) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "class id exceeds matrix size " +
                        std::to_string(num_classes_));
    }
    ++counts_[gt * num_classes_ + pred];
}

void ConfusionMatrix::accumulate(const LabelSet& gt, const LabelSet& pred) {
    if (gt.size() != pred.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    "gt has " + std::to_string(gt.size()) + " labels, pred " +
                        std::to_string(pred.size()));
    }
    for (std::size_t i = 0; i < gt.size(); ++i) add(gt[i], pred[i]);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    if (other.num_classes_ != num_classes_) {
        throw Error(ErrorCode::LengthMismatch, "confusion matrix size mismatch");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        counts_[i] += other.counts_[i];
    }
    return *this;
}

std::uint64_t ConfusionMatrix::row_sum(std::uint16_t gt) const {
    std::uint64_t s = 0;
    for (std::size_t p = 0; p < num_classes_; ++p) {
        s += counts_[gt * num_classes_ + p];
    }
    return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::uint16_t pred) const {
    std::uint64_t s = 0;
    for (std::size_t g = 1; g < num_classes_; ++g) {
        s += counts_[g * num_classes_ + pred];
    }
    return s;
}

std::vector<std::optional<double>> per_class_iou(const ConfusionMatrix& cm) {
    std::vector<std::optional<double>> iou(cm.num_classes());
    for (std::uint16_t k = 1; k < cm.num_classes(); ++k) {
        const std::uint64_t row = cm.row_sum(k);
        if (row == 0) continue;  // absent from ground truth: excluded
        const std::uint64_t inter = cm.at(k, k);
        const std::uint64_t uni = row + cm.col_sum(k) - inter;
        iou[k] = uni > 0 ? 100.0 * static_cast<double>(inter) /
                               static_cast<double>(uni)
                         : 0.0;
    }
    return iou;
}

double miou(const ConfusionMatrix& cm) {
    const auto iou = per_class_iou(cm);
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& v : iou) {
        if (v) {
            sum += *v;
            ++count;
        }
    }
    if (count == 0) {
        throw Error(ErrorCode::NoValidClasses,
                    "no class has ground-truth points");
    }
    return sum / static_cast<double>(count);
}

double corruption_score(const std::vector<double>& per_intensity) {
    if (per_intensity.empty()) {
        throw Error(ErrorCode::EmptyList, "no per-intensity scores");
    }
    return std::accumulate(per_intensity.begin(), per_intensity.end(), 0.0) /
           static_cast<double>(per_intensity.size());
}

RobustnessReport robustness_summary(
    double clean_miou, const std::vector<CorruptionResult>& corruptions) {
    if (corruptions.size() != 6) {
        throw Error(ErrorCode::WrongCorruptionCount,
                    "expected 6 corruption scores, got " +
                        std::to_string(corruptions.size()));
    }
    if (!(clean_miou > 0.0)) {
        throw Error(ErrorCode::ZeroCleanScore, "clean mIoU must be positive");
    }
    RobustnessReport report;
    report.clean_miou = clean_miou;
    report.corruptions = corruptions;
    double sum = 0.0;
    for (auto& c : report.corruptions) {
        if (!c.per_intensity.empty()) c.score = corruption_score(c.per_intensity);
        c.ratio = 100.0 * c.score / clean_miou;
        sum += c.score;
    }
    report.rmiou = sum / 6.0;
    report.mr = 100.0 * report.rmiou / clean_miou;
    return report;
}

RobustnessReport robustness_summary(double clean_miou,
                                    const std::vector<double>& scores) {
    std::vector<CorruptionResult> corruptions(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        corruptions[i].name = "corruption-" + std::to_string(i);
        corruptions[i].score = scores[i];
    }
    return robustness_summary(clean_miou, corruptions);
}

std::string report_to_json(const RobustnessReport& report) {
    nlohmann::json doc;
    doc["clean_miou"] = report.clean_miou;
    doc["rmiou"] = report.rmiou;
    doc["mr"] = report.mr;
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : report.corruptions) {
        nlohmann::json e;
        e["name"] = c.name;
        e["per_intensity"] = c.per_intensity;
        e["score"] = c.score;
        e["ratio"] = c.ratio;
        list.push_back(e);
    }
    doc["corruptions"] = list;
    return doc.dump(2) + "\n";
}

std::string iou_report_to_json(
    const ConfusionMatrix& cm,
    const std::map<std::uint16_t, std::string>& class_names) {
    nlohmann::json doc;
    const auto iou = per_class_iou(cm);
    nlohmann::json classes = nlohmann::json::object();
    for (std::uint16_t k = 1; k < cm.num_classes(); ++k) {
        if (!iou[k]) continue;
        const auto it = class_names.find(k);
        const std::string name =
            it != class_names.end() ? it->second : "class-" + std::to_string(k);
        classes[name] = *iou[k];
    }
    doc["per_class_iou"] = classes;
    doc["miou"] = miou(cm);
    return doc.dump(2) + "\n";
}

}  // namespace scanforge
