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

#include "socdist/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "socdist/errors.hpp"

namespace socdist {

Json to_json(const FrameReport& report)
{
    Json statuses = Json::array();
    for (const auto& s : report.statuses) {
        Json entry = {{"index", s.index}, {"x", s.point.x}, {"y", s.point.y}, {"color", to_string(s.color)}};
        if (s.index < report.boxes.size()) {
            const auto& b = report.boxes[s.index];
            entry["box"] = {b.x1, b.y1, b.x2, b.y2};
        }
        statuses.push_back(std::move(entry));
    }
    Json violations = Json::array();
    for (const auto& v : report.violations) violations.push_back({{"i", v.i}, {"j", v.j}, {"d", v.d}});
    return {{"frame", report.frame_index},
            {"person_count", report.person_count},
            {"violation_count", report.violation_count},
            {"statuses", std::move(statuses)},
            {"violations", std::move(violations)}};
}

std::string format_frame_report(const FrameReport& report) { return to_json(report).dump(); }

Json to_json(const Homography& h)
{
    Json rows = Json::array();
    for (const auto& row : h.matrix()) rows.push_back({row[0], row[1], row[2]});
    return rows;
}

Json to_json(const ViolationEvent& e) { return Json::parse(format_event(e)); }

Json to_json(const SeriesBucket& b)
{
    return {{"bucket_start", b.bucket_start},
            {"violation_sum", b.violation_sum},
            {"frame_count", b.frame_count},
            {"max_violations", b.max_violations}};
}

Json to_json(const RunSummary& s)
{
    return {{"frames_processed", s.frames_processed},
            {"total_violations", s.total_violations},
            {"wall_time", s.wall_time},
            {"fps", round_fps(s.fps)}};
}

CalibrationQuad parse_corners(const nlohmann::json& corners)
{
    if (!corners.is_array() || corners.size() != 4)
        throw ConfigError("corners", "exactly 4 corners required");
    CalibrationQuad quad;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& c = corners[i];
        if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
            throw ConfigError("corners", "corner " + std::to_string(i) + " must be an [x, y] number pair");
        quad.corners[i] = {c[0].get<double>(), c[1].get<double>()};
        if (!std::isfinite(quad.corners[i].x) || !std::isfinite(quad.corners[i].y))
            throw ConfigError("corners", "corner " + std::to_string(i) + " is not finite");
    }
    return quad;
}

Json corners_to_json(const CalibrationQuad& quad)
{
    Json out = Json::array();
    for (const auto& c : quad.corners) out.push_back({c.x, c.y});
    return out;
}

namespace {

double positive_number(const nlohmann::json& v, const std::string& field, const std::string& message)
{
    if (!v.is_number()) throw ConfigError(field, field + " must be a number");
    const double x = v.get<double>();
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(field, message);
    return x;
}

double unit_number(const nlohmann::json& v, const std::string& field)
{
    if (!v.is_number()) throw ConfigError(field, field + " must be a number");
    const double x = v.get<double>();
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(field, field + " must lie in [0, 1]");
    return x;
}

std::string string_field(const nlohmann::json& v, const std::string& field)
{
    if (!v.is_string()) throw ConfigError(field, field + " must be a string");
    return v.get<std::string>();
}

}  // namespace

CalibrationFile parse_calibration(const nlohmann::json& doc)
{
    if (!doc.is_object()) throw ConfigError("calibration", "calibration must be an object");
    for (const auto& [key, _] : doc.items())
        if (key != "corners" && key != "side")
            throw ConfigError(key, "unknown calibration field '" + key + "'");
    if (!doc.contains("corners")) throw ConfigError("corners", "exactly 4 corners required");
    CalibrationFile cal;
    cal.quad = parse_corners(doc["corners"]);
    if (doc.contains("side")) cal.side = positive_number(doc["side"], "side", "side must be positive");
    return cal;
}

Json to_json(const CalibrationFile& cal)
{
    return {{"corners", corners_to_json(cal.quad)}, {"side", cal.side}};
}

CalibrationFile read_calibration_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open calibration file '" + path.string() + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("calibration", "malformed calibration file: " + std::string(e.what()));
    }
    return parse_calibration(doc);
}

void write_calibration_file(const std::filesystem::path& path, const CalibrationFile& cal)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write calibration file '" + path.string() + "'");
    out << to_json(cal).dump(2) << '\n';
    if (!out) throw IoError("cannot write calibration file '" + path.string() + "'");
}

Json config_view(const PipelineConfig& cfg)
{
    return {{"threshold_t", cfg.violation.threshold_t},
            {"confidence_threshold", cfg.nms.confidence_threshold},
            {"iou_threshold", cfg.nms.iou_threshold},
            {"space", to_string(cfg.violation.space)},
            {"anchor_mode", to_string(cfg.violation.anchor_mode)},
            {"calibration", cfg.calibration ? corners_to_json(*cfg.calibration) : Json(nullptr)},
            {"birdseye_side", cfg.birdseye_side}};
}

PipelineConfig apply_config_update(const PipelineConfig& base, const nlohmann::json& update)
{
    if (!update.is_object()) throw ConfigError("", "config update must be an object");
    PipelineConfig cfg = base;
    for (const auto& [key, value] : update.items()) {
        if (key == "threshold_t") {
            cfg.violation.threshold_t = positive_number(value, key, "threshold must be positive");
        } else if (key == "confidence_threshold") {
            cfg.nms.confidence_threshold = unit_number(value, key);
        } else if (key == "iou_threshold") {
            cfg.nms.iou_threshold = unit_number(value, key);
        } else if (key == "space") {
            cfg.violation.space = parse_distance_space(string_field(value, key));
        } else if (key == "anchor_mode") {
            cfg.violation.anchor_mode = parse_anchor_mode(string_field(value, key));
        } else if (key == "calibration") {
            if (value.is_null())
                cfg.calibration.reset();
            else
                cfg.calibration = parse_corners(value);
        } else if (key == "birdseye_side") {
            cfg.birdseye_side = positive_number(value, key, "birdseye_side must be positive");
        } else {
            throw ConfigError(key, "unknown config field '" + key + "'");
        }
    }
    try {
        cfg.validate();
    } catch (const DegenerateCalibration& e) {
        throw ConfigError("calibration", e.what());
    }
    return cfg;
}

}  // namespace socdist
