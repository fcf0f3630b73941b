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

#include "socdist/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "socdist/errors.hpp"

namespace socdist {

using nlohmann::json;

void NmsConfig::validate() const
{
    if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0))
        throw ConfigError("confidence_threshold", "confidence_threshold must lie in [0, 1]");
    if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0))
        throw ConfigError("iou_threshold", "iou_threshold must lie in [0, 1]");
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept
{
    const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Detection> non_max_suppression(const std::vector<Detection>& dets, const NmsConfig& cfg)
{
    std::vector<std::size_t> order;
    order.reserve(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i)
        if (dets[i].confidence >= cfg.confidence_threshold) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].confidence > dets[b].confidence;
    });

    std::vector<Detection> kept;
    kept.reserve(order.size());
    for (std::size_t idx : order) {
        const Detection& cand = dets[idx];
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
            return k.class_id == cand.class_id && iou(k.box, cand.box) > cfg.iou_threshold;
        });
        if (!suppressed) kept.push_back(cand);
    }
    return kept;
}

FrameDetections filter_persons(const FrameDetections& fd, int person_class_id)
{
    FrameDetections out{fd.frame_index, {}};
    std::copy_if(fd.detections.begin(), fd.detections.end(), std::back_inserter(out.detections),
                 [&](const Detection& d) { return d.class_id == person_class_id; });
    return out;
}

namespace {

double number_field(const json& obj, const char* key, std::size_t line)
{
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(line, std::string("missing field '") + key + "'");
    if (!it->is_number()) throw ParseError(line, std::string("field '") + key + "' must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ParseError(line, std::string("field '") + key + "' is not finite");
    return v;
}

std::int64_t integer_field(const json& obj, const char* key, std::size_t line)
{
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(line, std::string("missing field '") + key + "'");
    if (!it->is_number_integer())
        throw ParseError(line, std::string("field '") + key + "' must be an integer");
    return it->get<std::int64_t>();
}

Detection parse_detection(const json& obj, std::size_t line, bool require_confidence)
{
    if (!obj.is_object()) throw ParseError(line, "detection must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (key != "x1" && key != "y1" && key != "x2" && key != "y2" && key != "class_id" &&
            key != "confidence")
            throw ParseError(line, "unknown detection field '" + key + "'");
    }
    Detection d;
    d.box = {number_field(obj, "x1", line), number_field(obj, "y1", line),
             number_field(obj, "x2", line), number_field(obj, "y2", line)};
    if (!d.box.valid()) throw ParseError(line, "bounding box requires x1 < x2 and y1 < y2");
    const std::int64_t cls = integer_field(obj, "class_id", line);
    if (cls < 0 || cls > std::numeric_limits<int>::max())
        throw ParseError(line, "class_id must be a non-negative integer");
    d.class_id = static_cast<int>(cls);
    if (require_confidence || obj.contains("confidence")) {
        d.confidence = number_field(obj, "confidence", line);
        if (d.confidence < 0.0 || d.confidence > 1.0)
            throw ParseError(line, "confidence " + std::to_string(d.confidence) + " outside [0, 1]");
    } else {
        d.confidence = 1.0;
    }
    return d;
}

}  // namespace

FrameDetections parse_detection_record(const std::string& line, std::size_t line_number,
                                       bool require_confidence)
{
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(line_number, std::string("malformed record: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError(line_number, "record must be an object");
    for (const auto& [key, _] : doc.items())
        if (key != "frame" && key != "detections")
            throw ParseError(line_number, "unknown record field '" + key + "'");

    FrameDetections fd;
    fd.frame_index = integer_field(doc, "frame", line_number);
    if (fd.frame_index < 0) throw ParseError(line_number, "frame must be non-negative");
    const auto it = doc.find("detections");
    if (it == doc.end() || !it->is_array())
        throw ParseError(line_number, "field 'detections' must be an array");
    fd.detections.reserve(it->size());
    for (const auto& d : *it) fd.detections.push_back(parse_detection(d, line_number, require_confidence));
    return fd;
}

std::string format_detection_record(const FrameDetections& fd)
{
    nlohmann::ordered_json dets = nlohmann::ordered_json::array();
    for (const auto& d : fd.detections) {
        dets.push_back({{"x1", d.box.x1},
                        {"y1", d.box.y1},
                        {"x2", d.box.x2},
                        {"y2", d.box.y2},
                        {"class_id", d.class_id},
                        {"confidence", d.confidence}});
    }
    nlohmann::ordered_json rec = {{"frame", fd.frame_index}, {"detections", std::move(dets)}};
    return rec.dump();
}

DetectionStream::DetectionStream(const std::filesystem::path& path, bool require_confidence)
    : in_(path), require_confidence_(require_confidence)
{
    if (!in_) throw IoError("cannot open detection file '" + path.string() + "'");
}

std::optional<FrameDetections> DetectionStream::next()
{
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        FrameDetections fd = parse_detection_record(line, line_, require_confidence_);
        if (last_frame_ && fd.frame_index <= *last_frame_)
            throw StreamOrderError(line_, "frame " + std::to_string(fd.frame_index) +
                                              " does not follow frame " +
                                              std::to_string(*last_frame_));
        last_frame_ = fd.frame_index;
        return fd;
    }
    if (in_.bad()) throw IoError("read failure at line " + std::to_string(line_ + 1));
    return std::nullopt;
}

std::vector<FrameDetections> load_recorded_detections(const std::filesystem::path& path,
                                                      bool require_confidence)
{
    DetectionStream stream(path, require_confidence);
    std::vector<FrameDetections> frames;
    while (auto fd = stream.next()) frames.push_back(std::move(*fd));
    return frames;
}

RecordedDetectorBackend::RecordedDetectorBackend(std::vector<FrameDetections> frames)
{
    for (auto& fd : frames) frames_[fd.frame_index] = std::move(fd.detections);
}

std::unique_ptr<RecordedDetectorBackend> RecordedDetectorBackend::from_file(
    const std::filesystem::path& path)
{
    return std::make_unique<RecordedDetectorBackend>(load_recorded_detections(path));
}

FrameDetections RecordedDetectorBackend::detect(const FrameRef& frame)
{
    const auto it = frames_.find(frame.frame_index);
    if (it == frames_.end()) return {frame.frame_index, {}};
    return {frame.frame_index, it->second};
}

}  // namespace socdist
