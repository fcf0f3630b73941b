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
 * @file serialization.hpp
 * @brief JSON documents shared by the CLI, the report stream and the HTTP API.
 *
 * Frame report record (one per line):
 *
 *     {"frame": 7, "person_count": 3, "violation_count": 1,
 *      "statuses": [{"index": 0, "x": .., "y": .., "color": "red",
 *                    "box": [x1, y1, x2, y2]}, ...],
 *      "violations": [{"i": 0, "j": 1, "d": 42.4}, ...]}
 *
 * Calibration file: {"corners": [[x, y], [x, y], [x, y], [x, y]], "side": 448}
 * with corners ordered top-left, top-right, bottom-right, bottom-left.
 *
 * Config view: {"threshold_t", "confidence_threshold", "iou_threshold",
 * "space", "anchor_mode", "calibration", "birdseye_side"}, where
 * calibration is null or [[x, y] x 4].
 */

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "socdist/geometry.hpp"
#include "socdist/pipeline.hpp"
#include "socdist/store.hpp"
#include "socdist/violation.hpp"

namespace socdist {

using Json = nlohmann::ordered_json;

Json to_json(const FrameReport& report);
std::string format_frame_report(const FrameReport& report);

Json to_json(const Homography& h);
Json to_json(const ViolationEvent& e);
Json to_json(const SeriesBucket& b);
Json to_json(const RunSummary& s);

struct CalibrationFile {
    CalibrationQuad quad;
    double side = kDefaultBirdseyeSide;
};

/// Corner list as [[x, y] x 4]. Throws ConfigError("corners", ...) unless
/// there are exactly four finite numeric pairs.
CalibrationQuad parse_corners(const nlohmann::json& corners);
Json corners_to_json(const CalibrationQuad& quad);

CalibrationFile parse_calibration(const nlohmann::json& doc);
Json to_json(const CalibrationFile& cal);
/// Throws IoError if the file cannot be read, ConfigError on bad content.
CalibrationFile read_calibration_file(const std::filesystem::path& path);
void write_calibration_file(const std::filesystem::path& path, const CalibrationFile& cal);

/// Dashboard view of a PipelineConfig.
Json config_view(const PipelineConfig& cfg);

/// Returns `base` with the fields present in `update` replaced, validated as
/// a whole. Unknown keys and type mismatches raise ConfigError naming the
/// field; `base` is never modified.
PipelineConfig apply_config_update(const PipelineConfig& base, const nlohmann::json& update);

}  // namespace socdist
