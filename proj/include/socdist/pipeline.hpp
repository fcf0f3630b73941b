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
 * @file pipeline.hpp
 * @brief Frame-by-frame orchestration: person filter, NMS, violation
 * analysis, report emission, event logging and FPS accounting.
 *
 * @code
 * socdist::PipelineConfig cfg;              // 50 px, 0.3 / 0.3, image plane
 * socdist::JsonlReportSink reports("report.jsonl");
 * auto store = socdist::EventStore::open("events.log");
 * auto summary = socdist::run_pipeline(
 *     socdist::DetectionRecordsSource{"walk.jsonl"}, cfg, reports, store);
 * @endcode
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "socdist/detection.hpp"
#include "socdist/errors.hpp"
#include "socdist/geometry.hpp"
#include "socdist/store.hpp"
#include "socdist/violation.hpp"

namespace socdist {

struct PipelineConfig {
    NmsConfig nms;
    ViolationConfig violation;
    std::optional<CalibrationQuad> calibration;
    double birdseye_side = kDefaultBirdseyeSide;
    int person_class_id = kPersonClassId;

    /// Throws ConfigError (or DegenerateCalibration for a bad quad).
    void validate() const;

    /// Bird's-eye homography when the violation space needs one.
    std::optional<Homography> homography() const;
};

/// Line-delimited detection records; no images.
struct DetectionRecordsSource {
    std::filesystem::path path;
};

/// Directory of numbered rasters (`<n>.png`, `<n>.ppm`, `<n>.pgm`), each
/// handed to the backend in ascending numeric order.
struct ImageSequenceSource {
    std::filesystem::path directory;
    std::shared_ptr<DetectorBackend> backend;
};

using FrameSource = std::variant<DetectionRecordsSource, ImageSequenceSource>;

/// Numbered images of a sequence directory, ascending. Throws IoError if the
/// directory is missing and StreamOrderError on duplicate frame numbers.
std::vector<FrameRef> list_image_sequence(const std::filesystem::path& directory);

class ReportSink {
public:
    virtual ~ReportSink() = default;
    virtual void emit(const FrameReport& report) = 0;
};

/// Writes one serialized FrameReport per line.
class JsonlReportSink final : public ReportSink {
public:
    explicit JsonlReportSink(const std::filesystem::path& path);
    void emit(const FrameReport& report) override;

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

class NullReportSink final : public ReportSink {
public:
    void emit(const FrameReport&) override {}
};

class NullEventSink final : public EventSink {
public:
    void append(const ViolationEvent&) override {}
};

/// Applies one configuration to person-filtered frames. The homography is
/// computed once at construction.
class FrameProcessor {
public:
    explicit FrameProcessor(PipelineConfig cfg);

    FrameReport process(const FrameDetections& raw) const;
    const PipelineConfig& config() const noexcept { return cfg_; }

private:
    PipelineConfig cfg_;
    std::optional<Homography> homography_;
};

struct RunOptions {
    std::string run_id = "run";
    /// Event timestamp (ms) for a report. Defaults to the wall clock. The
    /// pipeline clamps results so timestamps never decrease within a run.
    std::function<std::int64_t(const FrameReport&)> clock;
    /// When set and the source has images, annotated frames are written
    /// here as `<frame>.png`.
    std::optional<std::filesystem::path> annotate_dir;
};

struct RunSummary {
    std::int64_t frames_processed = 0;
    std::int64_t total_violations = 0;
    double wall_time = 0.0;  // seconds
    double fps = 0.0;
};

/// Raised when a run aborts mid-stream.
class PipelineError : public Error {
public:
    PipelineError(std::int64_t frames_processed, const std::string& what)
        : Error("aborted after " + std::to_string(frames_processed) + " frames: " + what),
          frames_processed_(frames_processed) {}

    std::int64_t frames_processed() const noexcept { return frames_processed_; }

private:
    std::int64_t frames_processed_;
};

RunSummary run_pipeline(const FrameSource& source, const PipelineConfig& cfg, ReportSink& reports,
                        EventSink& events, const RunOptions& options = {});

/// frames / wall_time. Throws Error when wall_time is not positive.
double measure_fps(std::int64_t frames, double wall_time);

/// Rounds to two decimals, the precision summaries report.
double round_fps(double fps) noexcept;

std::int64_t wall_clock_ms();

}  // namespace socdist
