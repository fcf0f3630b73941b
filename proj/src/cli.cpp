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

#include "socdist/cli.hpp"

#include <csignal>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "socdist/errors.hpp"
#include "socdist/evaluation.hpp"
#include "socdist/pipeline.hpp"
#include "socdist/serialization.hpp"
#include "socdist/service.hpp"

namespace socdist {

namespace fs = std::filesystem;

namespace {

struct ConfigFlags {
    double threshold = kDefaultThresholdPx;
    double confidence = NmsConfig{}.confidence_threshold;
    double iou = NmsConfig{}.iou_threshold;
    std::string calibration;
    std::string space;  // empty: birdseye iff calibrated
    std::string anchor = "centroid";
    int person_class = kPersonClassId;

    void add_to(CLI::App& cmd)
    {
        cmd.add_option("--threshold", threshold, "Minimum permitted distance in pixels")->capture_default_str();
        cmd.add_option("--confidence", confidence, "NMS confidence threshold")->capture_default_str();
        cmd.add_option("--iou", iou, "NMS IoU threshold")->capture_default_str();
        cmd.add_option("--calibration", calibration, "Calibration file ({corners, side})");
        cmd.add_option("--space", space, "Distance space: image|birdseye (default birdseye when calibrated)");
        cmd.add_option("--anchor", anchor, "Person anchor: centroid|bottom")->capture_default_str();
        cmd.add_option("--person-class", person_class, "Class id treated as person")->capture_default_str();
    }

    PipelineConfig build() const
    {
        PipelineConfig cfg;
        cfg.violation.threshold_t = threshold;
        cfg.nms.confidence_threshold = confidence;
        cfg.nms.iou_threshold = iou;
        cfg.violation.anchor_mode = parse_anchor_mode(anchor);
        cfg.person_class_id = person_class;
        cfg.violation.validate();
        cfg.nms.validate();
        if (!calibration.empty()) {
            const auto cal = read_calibration_file(calibration);
            cfg.calibration = cal.quad;
            cfg.birdseye_side = cal.side;
        }
        cfg.violation.space = space.empty()
                                  ? (cfg.calibration ? DistanceSpace::BirdsEye : DistanceSpace::ImagePlane)
                                  : parse_distance_space(space);
        cfg.validate();
        return cfg;
    }
};

class UsageError : public Error {
public:
    using Error::Error;
};

void require_file(const std::string& path, const char* what)
{
    if (!fs::exists(path)) throw UsageError(std::string(what) + " '" + path + "' does not exist");
}

CalibrationQuad parse_points(const std::string& text)
{
    std::istringstream in(text);
    std::string token;
    nlohmann::json corners = nlohmann::json::array();
    while (in >> token) {
        const auto comma = token.find(',');
        if (comma == std::string::npos) throw ConfigError("points", "point '" + token + "' is not x,y");
        try {
            std::size_t used_x = 0, used_y = 0;
            const std::string xs = token.substr(0, comma), ys = token.substr(comma + 1);
            const double x = std::stod(xs, &used_x);
            const double y = std::stod(ys, &used_y);
            if (used_x != xs.size() || used_y != ys.size()) throw std::invalid_argument(token);
            corners.push_back({x, y});
        } catch (const std::logic_error&) {
            throw ConfigError("points", "point '" + token + "' is not x,y");
        }
    }
    return parse_corners(corners);
}

std::atomic<RiskService*> g_service{nullptr};

extern "C" void handle_stop_signal(int)
{
    if (auto* s = g_service.load()) s->stop();
}

struct AnalyzeFlags {
    std::string detections, frames, out, store, run_id = "run", annotate;
    bool logical_clock = false;
    bool no_fsync = false;
    ConfigFlags config;
};

int analyze(const AnalyzeFlags& f, std::ostream& out, std::ostream& err, const std::string& usage)
{
    const PipelineConfig cfg = f.config.build();
    if (f.detections.empty() && f.frames.empty()) {
        err << "analyze: one of --detections or --frames is required\n" << usage;
        return kExitUsage;
    }

    FrameSource source;
    if (!f.frames.empty()) {
        if (!fs::is_directory(f.frames)) throw UsageError("frame directory '" + f.frames + "' does not exist");
        const std::string records =
            f.detections.empty() ? (fs::path(f.frames) / "detections.jsonl").string() : f.detections;
        require_file(records, "detection file");
        source = ImageSequenceSource{f.frames, RecordedDetectorBackend::from_file(records)};
    } else {
        require_file(f.detections, "detection file");
        source = DetectionRecordsSource{f.detections};
    }

    std::unique_ptr<ReportSink> reports;
    if (f.out.empty())
        reports = std::make_unique<NullReportSink>();
    else
        reports = std::make_unique<JsonlReportSink>(f.out);

    std::optional<EventStore> store;
    NullEventSink null_events;
    if (!f.store.empty())
        store.emplace(EventStore::open(f.store, EventStore::Mode::ReadWrite,
                                       f.no_fsync ? EventStore::Durability::Buffered
                                                  : EventStore::Durability::Fsync));

    RunOptions options;
    options.run_id = f.run_id;
    if (f.logical_clock) options.clock = [](const FrameReport& r) { return r.frame_index; };
    if (!f.annotate.empty()) options.annotate_dir = fs::path(f.annotate);

    const RunSummary summary =
        run_pipeline(source, cfg, *reports, store ? static_cast<EventSink&>(*store) : null_events, options);
    out << to_json(summary).dump() << '\n';
    return kExitOk;
}

int evaluate(const std::string& pred, const std::string& gt, const EvaluationOptions& opts, std::ostream& out)
{
    require_file(pred, "prediction file");
    require_file(gt, "ground-truth file");
    const MetricReport m = evaluate_run(pred, gt, opts);
    out << Json{{"ap", m.ap}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                {"fps", round_fps(m.fps)}}
               .dump()
        << '\n';
    return kExitOk;
}

int calibrate(const std::string& points, double side, const std::string& out_path, std::ostream& out)
{
    const CalibrationFile cal{parse_points(points), side};
    const Homography h = birdseye_homography(cal.quad, cal.side);
    if (!out_path.empty()) write_calibration_file(out_path, cal);
    out << Json{{"homography", to_json(h)}, {"corners", corners_to_json(cal.quad)}, {"side", cal.side}}.dump()
        << '\n';
    return kExitOk;
}

struct ServeFlags {
    std::string store, assets, host = "127.0.0.1", detections;
    int port = 8080;
    double replay_fps = 30.0;
    bool loop = false;
    ConfigFlags config;
};

int serve(const ServeFlags& f, std::ostream& out)
{
    ConfigHandle config(f.config.build());
    LiveState live;

    const bool writer = !f.detections.empty();
    if (writer) require_file(f.detections, "detection file");
    const bool exists = fs::exists(f.store);
    if (!writer && !exists) EventStore::open(f.store);  // create an empty log
    EventStore store = EventStore::open(f.store, writer ? EventStore::Mode::ReadWrite : EventStore::Mode::ReadOnly);

    RiskApi api(store, config, live);
    RiskService service(api, f.assets.empty() ? std::nullopt : std::optional<fs::path>(f.assets));
    const int port = service.bind(f.host, f.port);

    std::unique_ptr<LiveProcessor> processor;
    if (writer) {
        processor = std::make_unique<LiveProcessor>(
            f.detections, config, store, live,
            LiveProcessor::Options{f.replay_fps, f.loop, "live-" + std::to_string(wall_clock_ms())});
        processor->start();
    }

    out << Json{{"listening", f.host + ":" + std::to_string(port)}}.dump() << std::endl;
    g_service = &service;
    std::signal(SIGINT, handle_stop_signal);
    std::signal(SIGTERM, handle_stop_signal);
    service.serve();
    g_service = nullptr;
    if (processor) processor->stop();
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Social-distancing violation analytics"};
    app.name("socdist");
    app.require_subcommand(1);

    AnalyzeFlags af;
    auto* analyze_cmd = app.add_subcommand("analyze", "Run the violation pipeline over a frame source");
    analyze_cmd->add_option("--detections", af.detections, "Detection-record file");
    analyze_cmd->add_option("--frames", af.frames, "Directory of numbered frame images");
    analyze_cmd->add_option("--out", af.out, "Report stream output (JSON lines)");
    analyze_cmd->add_option("--store", af.store, "Violation event store");
    analyze_cmd->add_option("--run-id", af.run_id, "Run identifier recorded with each event")->capture_default_str();
    analyze_cmd->add_option("--annotate", af.annotate, "Write annotated frames here (with --frames)");
    analyze_cmd->add_flag("--logical-clock", af.logical_clock, "Use the frame index as event timestamp");
    analyze_cmd->add_flag("--no-fsync", af.no_fsync, "Do not fsync the store after each event");
    af.config.add_to(*analyze_cmd);

    ServeFlags sf;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the risk-management HTTP API");
    serve_cmd->add_option("--store", sf.store, "Violation event store")->required();
    serve_cmd->add_option("--port", sf.port, "TCP port (0 picks a free one)")->capture_default_str();
    serve_cmd->add_option("--host", sf.host, "Bind address")->capture_default_str();
    serve_cmd->add_option("--assets", sf.assets, "Dashboard asset directory served at /");
    serve_cmd->add_option("--detections", sf.detections, "Replay this detection stream into the store");
    serve_cmd->add_option("--replay-fps", sf.replay_fps, "Replay pace (<= 0: unthrottled)")->capture_default_str();
    serve_cmd->add_flag("--loop", sf.loop, "Restart the replay when it ends");
    sf.config.add_to(*serve_cmd);

    std::string pred, gt;
    EvaluationOptions eo;
    double detector_time = 0.0;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
    eval_cmd->add_option("--pred", pred, "Prediction records")->required();
    eval_cmd->add_option("--gt", gt, "Ground-truth records")->required();
    eval_cmd->add_option("--iou", eo.iou_threshold, "Match IoU threshold")->capture_default_str();
    eval_cmd->add_option("--class", eo.class_id, "Class id to evaluate")->capture_default_str();
    auto* wall_opt = eval_cmd->add_option("--detector-wall-time", detector_time,
                                          "Seconds the detector took, for the fps figure");

    std::string points, cal_out;
    double side = kDefaultBirdseyeSide;
    auto* cal_cmd = app.add_subcommand("calibrate", "Compute the bird's-eye homography for four corners");
    cal_cmd->add_option("--points", points, "\"x1,y1 x2,y2 x3,y3 x4,y4\" as TL TR BR BL")->required();
    cal_cmd->add_option("--side", side, "Bird's-eye square side in pixels")->capture_default_str();
    cal_cmd->add_option("--out", cal_out, "Calibration file to write");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (analyze_cmd->parsed()) return analyze(af, out, err, analyze_cmd->help());
        if (serve_cmd->parsed()) return serve(sf, out);
        if (eval_cmd->parsed()) {
            if (wall_opt->count() > 0) eo.detector_wall_time = detector_time;
            return evaluate(pred, gt, eo, out);
        }
        if (cal_cmd->parsed()) return calibrate(points, side, cal_out, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DegenerateCalibration& e) {
        err << "error: degenerate calibration: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidGeometry& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const AlignmentError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UndefinedMetric& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace socdist
