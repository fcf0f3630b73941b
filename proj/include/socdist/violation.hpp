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
 * @file violation.hpp
 * @brief Pairwise proximity analysis over person anchor points.
 *
 * A pair of persons violates when the anchor distance d is strictly below
 * the threshold t. Persons in at least one violating pair are Red, all
 * others Green; d == t is Green.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "socdist/detection.hpp"
#include "socdist/geometry.hpp"

namespace socdist {

enum class DistanceSpace { ImagePlane, BirdsEye };

std::string_view to_string(DistanceSpace space) noexcept;
/// Accepts "image" and "birdseye".
DistanceSpace parse_distance_space(std::string_view text);

inline constexpr double kDefaultThresholdPx = 50.0;

struct ViolationConfig {
    double threshold_t = kDefaultThresholdPx;
    DistanceSpace space = DistanceSpace::ImagePlane;
    AnchorMode anchor_mode = AnchorMode::Centroid;

    void validate() const;
};

struct PairDistance {
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;

    friend bool operator==(const PairDistance&, const PairDistance&) = default;
};

/// A pair closer than the threshold; i < j.
using ViolationPair = PairDistance;

enum class StatusColor { Green, Red };

std::string_view to_string(StatusColor color) noexcept;

struct PersonStatus {
    std::size_t index = 0;
    Point2D point;  // in the configured distance space
    StatusColor color = StatusColor::Green;

    friend bool operator==(const PersonStatus&, const PersonStatus&) = default;
};

struct Classification {
    std::vector<ViolationPair> violations;  // ordered by (i, j)
    std::vector<PersonStatus> statuses;     // one per input point
};

struct FrameReport {
    std::int64_t frame_index = 0;
    std::size_t person_count = 0;
    std::vector<PersonStatus> statuses;
    std::vector<BoundingBox> boxes;  // image-plane box of each person, same order as statuses
    std::vector<ViolationPair> violations;
    std::size_t violation_count = 0;

    friend bool operator==(const FrameReport&, const FrameReport&) = default;
};

/// All n(n-1)/2 pairs in (i, j) lexicographic order.
std::vector<PairDistance> pairwise_distances(const std::vector<Point2D>& points);

Classification classify_violations(const std::vector<Point2D>& points, const ViolationConfig& cfg);

/// Builds the report for a frame whose detections are already person-filtered
/// and suppressed. `h` is required (and only used) for the bird's-eye space.
FrameReport frame_report(const FrameDetections& fd, const ViolationConfig& cfg,
                         const std::optional<Homography>& h);

}  // namespace socdist
