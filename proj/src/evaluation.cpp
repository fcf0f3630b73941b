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

#include "socdist/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "socdist/errors.hpp"
#include "socdist/pipeline.hpp"

namespace socdist {

std::size_t MatchResult::tp_count() const noexcept
{
    return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), MatchFlag::TruePositive));
}

MatchResult match_detections(const std::vector<Detection>& preds, const GroundTruthFrame& gts,
                             double iou_threshold)
{
    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preds[a].confidence > preds[b].confidence;
    });

    MatchResult result;
    result.gt_count = gts.boxes.size();
    result.flags.reserve(preds.size());
    result.confidences.reserve(preds.size());
    std::vector<bool> taken(gts.boxes.size(), false);

    for (std::size_t idx : order) {
        const Detection& p = preds[idx];
        std::optional<std::size_t> best;
        double best_iou = -1.0;
        for (std::size_t g = 0; g < gts.boxes.size(); ++g) {
            if (taken[g]) continue;
            const double v = iou(p.box, gts.boxes[g].box);
            if (v > best_iou) {
                best_iou = v;
                best = g;
            }
        }
        if (best && best_iou >= iou_threshold) {
            taken[*best] = true;
            result.flags.push_back(MatchFlag::TruePositive);
        } else {
            result.flags.push_back(MatchFlag::FalsePositive);
        }
        result.confidences.push_back(p.confidence);
    }
    result.fn_count = static_cast<std::size_t>(std::count(taken.begin(), taken.end(), false));
    return result;
}

double average_precision(const std::vector<MatchResult>& results)
{
    std::size_t total_gt = 0;
    struct Ranked {
        double confidence;
        bool tp;
    };
    std::vector<Ranked> ranked;
    for (const auto& r : results) {
        total_gt += r.gt_count;
        for (std::size_t i = 0; i < r.flags.size(); ++i)
            ranked.push_back({r.confidences[i], r.flags[i] == MatchFlag::TruePositive});
    }
    if (total_gt == 0) throw UndefinedMetric("average precision is undefined without ground truths");
    if (ranked.empty()) return 0.0;

    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Ranked& a, const Ranked& b) { return a.confidence > b.confidence; });

    std::vector<double> precision(ranked.size());
    std::vector<double> recall(ranked.size());
    std::size_t tp = 0;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
        if (ranked[k].tp) ++tp;
        precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
        recall[k] = static_cast<double>(tp) / static_cast<double>(total_gt);
    }
    // Precision envelope: best precision at this recall or beyond.
    for (std::size_t k = ranked.size() - 1; k-- > 0;) precision[k] = std::max(precision[k], precision[k + 1]);

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
        ap += (recall[k] - prev_recall) * precision[k];
        prev_recall = recall[k];
    }
    return std::clamp(ap, 0.0, 1.0);
}

double f1_score(double precision, double recall) noexcept
{
    const double sum = precision + recall;
    return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

MetricReport evaluate_frames(const std::vector<FrameDetections>& preds,
                             const std::vector<GroundTruthFrame>& gts, const EvaluationOptions& opts)
{
    std::map<std::int64_t, const FrameDetections*> by_frame;
    for (const auto& p : preds) by_frame[p.frame_index] = &p;
    std::map<std::int64_t, bool> gt_frames;
    for (const auto& g : gts) gt_frames[g.frame_index] = true;
    for (const auto& [frame, _] : by_frame)
        if (!gt_frames.count(frame))
            throw AlignmentError("prediction frame " + std::to_string(frame) + " has no ground truth");

    std::vector<MatchResult> results;
    results.reserve(gts.size());
    for (const auto& g : gts) {
        GroundTruthFrame cls_gt{g.frame_index, {}};
        std::copy_if(g.boxes.begin(), g.boxes.end(), std::back_inserter(cls_gt.boxes),
                     [&](const GroundTruthBox& b) { return b.class_id == opts.class_id; });
        std::vector<Detection> cls_preds;
        if (const auto it = by_frame.find(g.frame_index); it != by_frame.end())
            std::copy_if(it->second->detections.begin(), it->second->detections.end(),
                         std::back_inserter(cls_preds),
                         [&](const Detection& d) { return d.class_id == opts.class_id; });
        results.push_back(match_detections(cls_preds, cls_gt, opts.iou_threshold));
    }

    MetricReport report;
    report.ap = average_precision(results);
    std::size_t tp = 0, n_pred = 0, n_gt = 0;
    for (const auto& r : results) {
        tp += r.tp_count();
        n_pred += r.flags.size();
        n_gt += r.gt_count;
    }
    report.precision = n_pred ? static_cast<double>(tp) / static_cast<double>(n_pred) : 0.0;
    report.recall = static_cast<double>(tp) / static_cast<double>(n_gt);
    report.f1 = f1_score(report.precision, report.recall);
    if (opts.detector_wall_time)
        report.fps = measure_fps(static_cast<std::int64_t>(gts.size()), *opts.detector_wall_time);
    return report;
}

std::vector<GroundTruthFrame> load_ground_truth(const std::filesystem::path& path)
{
    std::vector<GroundTruthFrame> out;
    for (auto& fd : load_recorded_detections(path, /*require_confidence=*/false)) {
        GroundTruthFrame g{fd.frame_index, {}};
        g.boxes.reserve(fd.detections.size());
        for (const auto& d : fd.detections) g.boxes.push_back({d.box, d.class_id});
        out.push_back(std::move(g));
    }
    return out;
}

MetricReport evaluate_run(const std::filesystem::path& pred_file, const std::filesystem::path& gt_file,
                          const EvaluationOptions& opts)
{
    const auto gts = load_ground_truth(gt_file);
    const auto preds = load_recorded_detections(pred_file);
    return evaluate_frames(preds, gts, opts);
}

}  // namespace socdist
