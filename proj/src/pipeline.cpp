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

#include "socdist/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>

#include "socdist/render.hpp"
#include "socdist/serialization.hpp"

namespace socdist {

void PipelineConfig::validate() const
{
    nms.validate();
    violation.validate();
    if (!(birdseye_side > 0.0) || !std::isfinite(birdseye_side))
        throw ConfigError("birdseye_side", "birdseye_side must be positive");
    if (person_class_id < 0) throw ConfigError("person_class_id", "person_class_id must be non-negative");
    if (violation.space == DistanceSpace::BirdsEye && !calibration)
        throw ConfigError("calibration", "bird's-eye space requires a calibration");
    if (calibration) calibration->validate();
}

std::optional<Homography> PipelineConfig::homography() const
{
    if (violation.space != DistanceSpace::BirdsEye) return std::nullopt;
    if (!calibration) throw ConfigError("calibration", "bird's-eye space requires a calibration");
    return birdseye_homography(*calibration, birdseye_side);
}

std::vector<FrameRef> list_image_sequence(const std::filesystem::path& directory)
{
    std::error_code ec;
    if (!std::filesystem::is_directory(directory, ec))
        throw IoError("frame directory '" + directory.string() + "' does not exist");

    std::vector<FrameRef> frames;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext != ".png" && ext != ".ppm" && ext != ".pgm") continue;
        const std::string stem = entry.path().stem().string();
        if (stem.empty() || stem.size() > 18 ||
            !std::all_of(stem.begin(), stem.end(), [](unsigned char c) { return std::isdigit(c); }))
            continue;
        frames.push_back({std::stoll(stem), entry.path()});
    }
    std::sort(frames.begin(), frames.end(), [](const FrameRef& a, const FrameRef& b) {
        return a.frame_index != b.frame_index ? a.frame_index < b.frame_index
                                              : a.image_path < b.image_path;
    });
    for (std::size_t i = 1; i < frames.size(); ++i)
        if (frames[i].frame_index == frames[i - 1].frame_index)
            throw StreamOrderError(i + 1, "duplicate frame number " + std::to_string(frames[i].frame_index) +
                                              " in '" + directory.string() + "'");
    return frames;
}

JsonlReportSink::JsonlReportSink(const std::filesystem::path& path)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path)
{
    if (!out_) throw IoError("cannot open report file '" + path.string() + "'");
}

void JsonlReportSink::emit(const FrameReport& report)
{
    out_ << format_frame_report(report) << '\n';
    out_.flush();
    if (!out_) throw IoError("cannot write report file '" + path_.string() + "'");
}

FrameProcessor::FrameProcessor(PipelineConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.validate();
    homography_ = cfg_.homography();
}

FrameReport FrameProcessor::process(const FrameDetections& raw) const
{
    FrameDetections persons = filter_persons(raw, cfg_.person_class_id);
    persons.detections = non_max_suppression(persons.detections, cfg_.nms);
    return frame_report(persons, cfg_.violation, homography_);
}

double measure_fps(std::int64_t frames, double wall_time)
{
    if (!(wall_time > 0.0) || !std::isfinite(wall_time))
        throw Error("fps measurement needs a positive wall time");
    return static_cast<double>(frames) / wall_time;
}

double round_fps(double fps) noexcept { return std::round(fps * 100.0) / 100.0; }

std::int64_t wall_clock_ms()
{
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

namespace {

struct RunState {
    const FrameProcessor& processor;
    ReportSink& reports;
    EventSink& events;
    const RunOptions& options;
    RunSummary summary;
    std::int64_t last_timestamp = std::numeric_limits<std::int64_t>::min();

    FrameReport consume(const FrameDetections& fd)
    {
        FrameReport report = processor.process(fd);
        reports.emit(report);
        std::int64_t ts = options.clock ? options.clock(report) : wall_clock_ms();
        ts = std::max(ts, last_timestamp);
        last_timestamp = ts;
        events.append({ts, report.frame_index, static_cast<std::int64_t>(report.violation_count),
                       static_cast<std::int64_t>(report.person_count), options.run_id});
        ++summary.frames_processed;
        summary.total_violations += static_cast<std::int64_t>(report.violation_count);
        return report;
    }
};

}  // namespace

RunSummary run_pipeline(const FrameSource& source, const PipelineConfig& cfg, ReportSink& reports,
                        EventSink& events, const RunOptions& options)
{
    const FrameProcessor processor(cfg);  // config errors surface before any frame
    if (options.annotate_dir && std::holds_alternative<DetectionRecordsSource>(source))
        throw ConfigError("annotate", "annotation needs an image-sequence source");

    const auto start = std::chrono::steady_clock::now();
    RunState state{processor, reports, events, options, {}};

    try {
        if (const auto* records = std::get_if<DetectionRecordsSource>(&source)) {
            DetectionStream stream(records->path);
            while (auto fd = stream.next()) state.consume(*fd);
        } else {
            const auto& seq = std::get<ImageSequenceSource>(source);
            if (!seq.backend) throw ConfigError("backend", "image sequence needs a detector backend");
            if (options.annotate_dir) std::filesystem::create_directories(*options.annotate_dir);
            for (const auto& ref : list_image_sequence(seq.directory)) {
                FrameDetections fd = seq.backend->detect(ref);
                if (fd.frame_index != ref.frame_index)
                    throw StreamOrderError(static_cast<std::size_t>(state.summary.frames_processed + 1),
                                           "backend answered frame " + std::to_string(fd.frame_index) +
                                               " for frame " + std::to_string(ref.frame_index));
                const FrameReport report = state.consume(fd);
                if (options.annotate_dir) {
                    const cv::Mat annotated = render_annotations(load_frame_image(ref.image_path), report);
                    save_frame_image(*options.annotate_dir / (std::to_string(ref.frame_index) + ".png"),
                                     annotated);
                }
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(state.summary.frames_processed, e.what());
    }

    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    // steady_clock can report zero for an empty source on coarse timers.
    state.summary.wall_time = std::max(elapsed.count(), std::numeric_limits<double>::min());
    state.summary.fps = measure_fps(state.summary.frames_processed, state.summary.wall_time);
    return state.summary;
}

}  // namespace socdist
