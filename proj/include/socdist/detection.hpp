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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "socdist/geometry.hpp"

namespace socdist {

/// COCO class index of "person".
inline constexpr int kPersonClassId = 0;

struct Detection {
    BoundingBox box;
    int class_id = kPersonClassId;
    double confidence = 0.0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

struct FrameDetections {
    std::int64_t frame_index = 0;
    std::vector<Detection> detections;

    friend bool operator==(const FrameDetections&, const FrameDetections&) = default;
};

struct NmsConfig {
    double confidence_threshold = 0.3;
    double iou_threshold = 0.3;

    /// Throws ConfigError unless both thresholds lie in [0, 1].
    void validate() const;
};

double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Greedy per-class suppression. Detections below the confidence threshold are
/// dropped first; a box is suppressed when its IoU with an already kept box of
/// the same class is strictly greater than the IoU threshold. Equal confidences
/// keep input order. Result is sorted by confidence, highest first.
std::vector<Detection> non_max_suppression(const std::vector<Detection>& dets, const NmsConfig& cfg);

FrameDetections filter_persons(const FrameDetections& fd, int person_class_id = kPersonClassId);

/// Parses one detection record line. With `require_confidence == false` the
/// confidence key may be omitted (ground-truth files) and defaults to 1.
FrameDetections parse_detection_record(const std::string& line, std::size_t line_number,
                                       bool require_confidence = true);

/// Serializes a frame in the line-delimited record format (no trailing newline).
std::string format_detection_record(const FrameDetections& fd);

/// Sequential reader over a detection-record file. Single consumer.
class DetectionStream {
public:
    explicit DetectionStream(const std::filesystem::path& path, bool require_confidence = true);

    /// Next frame, or nullopt at end of file. Throws ParseError on a malformed
    /// line and StreamOrderError when frame indices stop ascending.
    std::optional<FrameDetections> next();

    std::size_t line_number() const noexcept { return line_; }

private:
    std::ifstream in_;
    std::size_t line_ = 0;
    std::optional<std::int64_t> last_frame_;
    bool require_confidence_;
};

std::vector<FrameDetections> load_recorded_detections(const std::filesystem::path& path,
                                                      bool require_confidence = true);

/// What a backend is asked to look at.
struct FrameRef {
    std::int64_t frame_index = 0;
    std::filesystem::path image_path;  // empty when the source carries no images
};

/// Boundary behind which a detector model lives.
class DetectorBackend {
public:
    virtual ~DetectorBackend() = default;
    virtual FrameDetections detect(const FrameRef& frame) = 0;
};

/// Replays pre-recorded detections keyed by frame index. Frames without a
/// record yield an empty detection list.
class RecordedDetectorBackend final : public DetectorBackend {
public:
    explicit RecordedDetectorBackend(std::vector<FrameDetections> frames);
    static std::unique_ptr<RecordedDetectorBackend> from_file(const std::filesystem::path& path);

    FrameDetections detect(const FrameRef& frame) override;

private:
    std::map<std::int64_t, std::vector<Detection>> frames_;
};

}  // namespace socdist
