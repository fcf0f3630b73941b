// Copyright (c) 2026 The socdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file evaluation.hpp
 * @brief Detection-quality metrics for a single class: greedy IoU matching,
 * dataset-level precision/recall, all-point interpolated AP, and F1.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "socdist/detection.hpp"

namespace socdist {

struct GroundTruthBox {
    BoundingBox box;
    int class_id = kPersonClassId;
};

struct GroundTruthFrame {
    std::int64_t frame_index = 0;
    std::vector<GroundTruthBox> boxes;
};

enum class MatchFlag { TruePositive, FalsePositive };

struct MatchResult {
    std::vector<MatchFlag> flags;      // by descending confidence
    std::vector<double> confidences;   // parallel to flags
    std::size_t gt_count = 0;
    std::size_t fn_count = 0;          // ground truths left unmatched

    std::size_t tp_count() const noexcept;
};

struct MetricReport {
    double ap = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double fps = 0.0;
};

/// Predictions are visited by confidence, highest first (ties keep input
/// order). Each takes the still-unmatched ground truth with the largest IoU
/// when that IoU reaches `iou_threshold`; otherwise it is a false positive.
MatchResult match_detections(const std::vector<Detection>& preds, const GroundTruthFrame& gts,
                             double iou_threshold = 0.5);

/// All-point interpolated AP over every prediction of every frame, ranked by
/// confidence. Throws UndefinedMetric when there are no ground truths.
double average_precision(const std::vector<MatchResult>& results);

double f1_score(double precision, double recall) noexcept;

struct EvaluationOptions {
    double iou_threshold = 0.5;
    int class_id = kPersonClassId;
    /// Seconds the detector took to produce the predictions; fills MetricReport::fps.
    std::optional<double> detector_wall_time;
};

/// Matches every frame, aggregates at dataset level. A prediction frame absent
/// from the ground truth is an AlignmentError; ground-truth frames without
/// predictions count as frames with no detections.
MetricReport evaluate_frames(const std::vector<FrameDetections>& preds,
                             const std::vector<GroundTruthFrame>& gts, const EvaluationOptions& opts = {});

MetricReport evaluate_run(const std::filesystem::path& pred_file, const std::filesystem::path& gt_file,
                          const EvaluationOptions& opts = {});

/// Ground-truth file: detection-record lines, confidence optional.
std::vector<GroundTruthFrame> load_ground_truth(const std::filesystem::path& path);

}  // namespace socdist
