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

#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "socdist/errors.hpp"
#include "socdist/evaluation.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace socdist;
using namespace socdist::testing;

namespace {

Detection det(double x1, double y1, double x2, double y2, double conf, int cls = 0)
{
    return {{x1, y1, x2, y2}, cls, conf};
}

MatchResult ranked(std::vector<std::pair<double, bool>> items, std::size_t gt)
{
    MatchResult r;
    r.gt_count = gt;
    std::stable_sort(items.begin(), items.end(), [](auto& a, auto& b) { return a.first > b.first; });
    std::size_t tp = 0;
    for (const auto& [c, hit] : items) {
        r.confidences.push_back(c);
        r.flags.push_back(hit ? MatchFlag::TruePositive : MatchFlag::FalsePositive);
        tp += hit;
    }
    r.fn_count = gt - tp;
    return r;
}


}  // namespace

TEST_CASE("match_detections")
{
    const GroundTruthFrame one{0, {{{0, 0, 10, 10}}}};

    SUBCASE("exact match is a true positive")
    {
        const auto r = match_detections({det(0, 0, 10, 10, 0.9)}, one);
        CHECK(r.flags == std::vector{MatchFlag::TruePositive});
        CHECK(r.fn_count == 0);
    }
    SUBCASE("no ground truth makes everything a false positive")
    {
        const auto r = match_detections({det(0, 0, 10, 10, 0.9)}, GroundTruthFrame{0, {}});
        CHECK(r.flags == std::vector{MatchFlag::FalsePositive});
        CHECK(r.gt_count == 0);
    }
    SUBCASE("a ground truth is claimed once, by the most confident prediction")
    {
        const auto r = match_detections({det(0, 0, 10, 10, 0.6), det(0, 0, 10, 10, 0.9)}, one);
        CHECK(r.flags == std::vector{MatchFlag::TruePositive, MatchFlag::FalsePositive});
        CHECK(r.confidences == std::vector{0.9, 0.6});
    }
    SUBCASE("IoU at the threshold counts")
    {
        // [0,10]x[0,10] vs [0,10]x[0,5]: IoU 0.5 exactly.
        CHECK(match_detections({det(0, 0, 10, 5, 0.5)}, one).tp_count() == 1);
        CHECK(match_detections({det(0, 0, 10, 4.9, 0.5)}, one).tp_count() == 0);
    }
    SUBCASE("best unmatched ground truth is chosen")
    {
        const GroundTruthFrame two{0, {{{0, 0, 10, 10}}, {{2, 0, 12, 10}}}};
        const auto r = match_detections({det(2, 0, 12, 10, 0.9), det(0, 0, 10, 10, 0.8)}, two);
        CHECK(r.tp_count() == 2);
    }
}

TEST_CASE("average_precision examples")
{
    CHECK(average_precision({ranked({{0.9, true}, {0.8, true}}, 2)}) == 1.0);
    CHECK(average_precision({ranked({{0.9, false}, {0.8, true}}, 1)}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(average_precision({ranked({}, 3)}) == 0.0);
    CHECK_THROWS_AS(average_precision({ranked({{0.9, false}}, 0)}), UndefinedMetric);
    CHECK_THROWS_AS(average_precision({}), UndefinedMetric);
    // Half the ground truth found, at full precision.
    CHECK(average_precision({ranked({{0.9, true}}, 2)}) == doctest::Approx(0.5).epsilon(1e-12));
    // Pooled across frames, ranked globally.
    CHECK(average_precision({ranked({{0.9, true}}, 1), ranked({{0.95, false}}, 1)}) ==
          doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("f1_score")
{
    CHECK(f1_score(1.0, 1.0) == 1.0);
    CHECK(f1_score(0.0, 0.0) == 0.0);
    CHECK(f1_score(0.5, 1.0) == doctest::Approx(2.0 / 3.0));
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        const double p = testing::uniform(rng, 0, 1), r = testing::uniform(rng, 0, 1);
        const double f = f1_score(p, r);
        CHECK(f == doctest::Approx(f1_score(r, p)));
        CHECK(f <= std::min(2 * p, 2 * r) + 1e-12);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
}

TEST_CASE("average_precision matches PR-curve enumeration")
{
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t gt = static_cast<std::size_t>(testing::uniform_int(rng, 1, 10));
        const int n = testing::uniform_int(rng, 0, 20);
        std::vector<std::pair<double, bool>> items;
        std::size_t tp = 0;
        for (int k = 0; k < n; ++k) {
            const bool hit = tp < gt && testing::uniform_int(rng, 0, 1) == 1;
            tp += hit;
            items.push_back({testing::uniform(rng, 0.0, 1.0), hit});
        }
        // Split across random frames; pooled ranking must not care.
        std::vector<std::vector<std::pair<double, bool>>> parts(3);
        for (const auto& it : items) parts[testing::uniform_int(rng, 0, 2)].push_back(it);
        std::vector<MatchResult> results;
        std::size_t gt_left = gt;
        for (int f = 0; f < 3; ++f) {
            std::size_t tps = 0;
            for (const auto& it : parts[f]) tps += it.second;
            const std::size_t g = f == 2 ? gt_left : tps;
            gt_left -= g;
            results.push_back(ranked(parts[f], g));
        }
        const double ap = average_precision(results);
        CHECK(std::abs(ap - oracle_ap(items, gt)) < 1e-9);
        CHECK(ap >= 0.0);
        CHECK(ap <= 1.0);

        // Dropping a false positive never lowers AP.
        const auto fp = std::find_if(items.begin(), items.end(), [](auto& it) { return !it.second; });
        if (fp != items.end()) {
            auto fewer = items;
            fewer.erase(fewer.begin() + (fp - items.begin()));
            CHECK(average_precision({ranked(fewer, gt)}) >= ap - 1e-12);
        }
        // Only the ranking matters: a monotone rescale of confidences changes nothing.
        auto rescaled = items;
        for (auto& it : rescaled) it.first = std::pow(it.first, 3.0) * 0.5;
        CHECK(std::abs(average_precision({ranked(rescaled, gt)}) - ap) < 1e-12);
    }
}

TEST_CASE("evaluate_frames and evaluate_run")
{
    testing::TempDir tmp;
    Rng rng(10);
    std::vector<FrameDetections> truth;
    for (int f = 0; f < 10; ++f) {
        FrameDetections fd{f, {}};
        for (int k = 0; k < 4; ++k) fd.detections.push_back({{k * 100.0, 0, k * 100.0 + 50, 120}, 0, 1.0});
        truth.push_back(fd);
    }
    std::string text;
    for (const auto& fd : truth) text += format_detection_record(fd) + "\n";
    testing::write_text(tmp / "gt.jsonl", text);

    SUBCASE("predictions identical to ground truth")
    {
        testing::write_text(tmp / "pred.jsonl", text);
        const auto m = evaluate_run(tmp / "pred.jsonl", tmp / "gt.jsonl");
        CHECK(m.ap == 1.0);
        CHECK(m.precision == 1.0);
        CHECK(m.recall == 1.0);
        CHECK(m.f1 == 1.0);
        CHECK(m.fps == 0.0);
    }
    SUBCASE("one half-shifted copy per box")
    {
        // Each frame: 4 exact hits (conf 0.9) + 4 boxes shifted by a full
        // width (conf 0.4, IoU 0). AP 1, precision 0.5, recall 1.
        std::vector<FrameDetections> preds = truth;
        for (auto& fd : preds) {
            const auto base = fd.detections;
            fd.detections.clear();
            for (const auto& d : base) {
                fd.detections.push_back({d.box, 0, 0.9});
                fd.detections.push_back({{d.box.x1, d.box.y1 + 200, d.box.x2, d.box.y2 + 200}, 0, 0.4});
            }
        }
        const auto gts = load_ground_truth(tmp / "gt.jsonl");
        EvaluationOptions opts;
        opts.detector_wall_time = 2.0;
        const auto m = evaluate_frames(preds, gts, opts);
        CHECK(m.ap == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.precision == doctest::Approx(0.5));
        CHECK(m.recall == 1.0);
        CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
        CHECK(m.fps == doctest::Approx(5.0));
    }
    SUBCASE("other classes are ignored")
    {
        std::vector<FrameDetections> preds = truth;
        for (auto& fd : preds) fd.detections.push_back({{500, 500, 600, 600}, 2, 0.99});
        CHECK(evaluate_frames(preds, load_ground_truth(tmp / "gt.jsonl")).ap == 1.0);
    }
    SUBCASE("empty prediction file")
    {
        testing::write_text(tmp / "pred.jsonl", "");
        const auto m = evaluate_run(tmp / "pred.jsonl", tmp / "gt.jsonl");
        CHECK(m.ap == 0.0);
        CHECK(m.precision == 0.0);
        CHECK(m.recall == 0.0);
        CHECK(m.f1 == 0.0);
    }
    SUBCASE("prediction frame missing from ground truth")
    {
        std::vector<FrameDetections> preds = truth;
        preds.push_back({42, {det(0, 0, 1, 1, 0.5)}});
        CHECK_THROWS_AS(evaluate_frames(preds, load_ground_truth(tmp / "gt.jsonl")), AlignmentError);
    }
    SUBCASE("ground truth without boxes")
    {
        testing::write_text(tmp / "empty_gt.jsonl", "{\"frame\": 0, \"detections\": []}\n");
        testing::write_text(tmp / "pred.jsonl", "{\"frame\": 0, \"detections\": []}\n");
        CHECK_THROWS_AS(evaluate_run(tmp / "pred.jsonl", tmp / "empty_gt.jsonl"), UndefinedMetric);
    }
    SUBCASE("ground truth may omit confidence, predictions may not")
    {
        testing::write_text(tmp / "nc.jsonl",
                            R"({"frame": 0, "detections": [{"x1": 0, "y1": 0, "x2": 5, "y2": 5, "class_id": 0}]})"
                            "\n");
        CHECK(load_ground_truth(tmp / "nc.jsonl").at(0).boxes.size() == 1);
        CHECK_THROWS_AS(evaluate_run(tmp / "nc.jsonl", tmp / "nc.jsonl"), ParseError);
    }
}
