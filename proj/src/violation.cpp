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

#include "socdist/violation.hpp"

#include <cmath>
#include <string>

#include "socdist/errors.hpp"

namespace socdist {

std::string_view to_string(DistanceSpace space) noexcept
{
    return space == DistanceSpace::ImagePlane ? "image" : "birdseye";
}

DistanceSpace parse_distance_space(std::string_view text)
{
    if (text == "image") return DistanceSpace::ImagePlane;
    if (text == "birdseye") return DistanceSpace::BirdsEye;
    throw ConfigError("space", "space must be 'image' or 'birdseye', got '" + std::string(text) + "'");
}

std::string_view to_string(StatusColor color) noexcept
{
    return color == StatusColor::Red ? "red" : "green";
}

void ViolationConfig::validate() const
{
    if (!(threshold_t > 0.0) || !std::isfinite(threshold_t))
        throw ConfigError("threshold_t", "threshold must be positive");
}

std::vector<PairDistance> pairwise_distances(const std::vector<Point2D>& points)
{
    const std::size_t n = points.size();
    std::vector<PairDistance> out;
    if (n < 2) return out;
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            out.push_back({i, j, euclidean_distance(points[i], points[j])});
    return out;
}

Classification classify_violations(const std::vector<Point2D>& points, const ViolationConfig& cfg)
{
    Classification result;
    result.statuses.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        result.statuses.push_back({i, points[i], StatusColor::Green});

    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double d = euclidean_distance(points[i], points[j]);
            if (d < cfg.threshold_t) {
                result.violations.push_back({i, j, d});
                result.statuses[i].color = StatusColor::Red;
                result.statuses[j].color = StatusColor::Red;
            }
        }
    }
    return result;
}

FrameReport frame_report(const FrameDetections& fd, const ViolationConfig& cfg,
                         const std::optional<Homography>& h)
{
    cfg.validate();
    const bool birdseye = cfg.space == DistanceSpace::BirdsEye;
    if (birdseye && !h)
        throw ConfigError("calibration", "bird's-eye space requires a calibrated homography");

    FrameReport report;
    report.frame_index = fd.frame_index;
    report.person_count = fd.detections.size();
    report.boxes.reserve(fd.detections.size());

    std::vector<Point2D> points;
    points.reserve(fd.detections.size());
    for (const auto& det : fd.detections) {
        report.boxes.push_back(det.box);
        const Point2D anchor = anchor_point(det.box, cfg.anchor_mode);
        points.push_back(birdseye ? project_point(*h, anchor) : anchor);
    }

    auto cls = classify_violations(points, cfg);
    report.statuses = std::move(cls.statuses);
    report.violations = std::move(cls.violations);
    report.violation_count = report.violations.size();
    return report;
}

}  // namespace socdist
