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

#include "socdist/service.hpp"

#include <charconv>
#include <chrono>

#include <httplib.h>

#include "socdist/errors.hpp"

namespace socdist {

ConfigHandle::ConfigHandle(PipelineConfig initial)
{
    initial.validate();
    current_ = std::make_shared<const PipelineConfig>(std::move(initial));
}

std::shared_ptr<const PipelineConfig> ConfigHandle::snapshot() const
{
    std::lock_guard lock(read_mutex_);
    return current_;
}

std::shared_ptr<const PipelineConfig> ConfigHandle::update(
    const std::function<PipelineConfig(const PipelineConfig&)>& fn)
{
    std::lock_guard writer(write_mutex_);
    PipelineConfig next = fn(*snapshot());
    next.validate();
    auto ptr = std::make_shared<const PipelineConfig>(std::move(next));
    std::lock_guard lock(read_mutex_);
    current_ = ptr;
    return ptr;
}

void LiveState::publish(const FrameReport& report, double fps)
{
    std::lock_guard lock(mutex_);
    latest_ = report;
    fps_ = fps;
}

std::optional<FrameReport> LiveState::latest_report() const
{
    std::lock_guard lock(mutex_);
    return latest_;
}

double LiveState::fps() const
{
    std::lock_guard lock(mutex_);
    return fps_;
}

namespace {

ApiResponse error_response(int status, const std::string& message, const std::string& field = {})
{
    Json body = {{"error", message}};
    if (!field.empty()) body["field"] = field;
    return {status, std::move(body)};
}

std::optional<std::int64_t> parse_int(const std::string& text)
{
    std::int64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

}  // namespace

RiskApi::RiskApi(const EventStore& store, ConfigHandle& config, const LiveState& live)
    : store_(store), config_(config), live_(live)
{
}

ApiResponse RiskApi::stats() const
{
    Json latest = nullptr;
    if (const auto e = store_.latest()) {
        latest = {{"frame_index", e->frame_index},
                  {"person_count", e->person_count},
                  {"violation_count", e->violation_count},
                  {"timestamp", e->timestamp}};
    }
    return {200,
            {{"latest", std::move(latest)},
             {"total_violations", store_.total_violations()},
             {"events", store_.size()},
             {"fps", round_fps(live_.fps())}}};
}

ApiResponse RiskApi::series(const std::multimap<std::string, std::string>& params) const
{
    std::int64_t values[3] = {};
    const char* names[3] = {"from", "to", "bucket"};
    for (int i = 0; i < 3; ++i) {
        const auto it = params.find(names[i]);
        if (it == params.end()) return error_response(400, std::string("missing parameter '") + names[i] + "'", names[i]);
        const auto v = parse_int(it->second);
        if (!v) return error_response(400, std::string("parameter '") + names[i] + "' must be an integer", names[i]);
        values[i] = *v;
    }
    const auto [from, to, bucket] = values;
    if (from > to) return error_response(422, "from must not exceed to", "from");
    if (bucket <= 0) return error_response(422, "bucket must be positive", "bucket");

    std::optional<std::string> run_id;
    if (const auto it = params.find("run_id"); it != params.end()) run_id = it->second;

    std::vector<SeriesBucket> buckets;
    try {
        buckets = store_.aggregate_series(from, to, bucket, run_id);
    } catch (const StoreError& e) {
        return error_response(422, e.what(), "bucket");
    }
    Json arr = Json::array();
    for (const auto& b : buckets) arr.push_back(to_json(b));
    return {200, {{"from", from}, {"to", to}, {"bucket", bucket}, {"buckets", std::move(arr)}}};
}

ApiResponse RiskApi::get_config() const { return {200, config_view(*config_.snapshot())}; }

ApiResponse RiskApi::put_config(const std::string& body)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        return error_response(400, std::string("malformed JSON: ") + e.what());
    }
    try {
        const auto cfg = config_.update(
            [&](const PipelineConfig& current) { return apply_config_update(current, doc); });
        return {200, config_view(*cfg)};
    } catch (const ConfigError& e) {
        return error_response(422, e.what(), e.field());
    } catch (const DegenerateCalibration& e) {
        return error_response(422, e.what(), "calibration");
    }
}

ApiResponse RiskApi::post_calibration(const std::string& body)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        return error_response(400, std::string("malformed JSON: ") + e.what());
    }
    try {
        const CalibrationFile cal = parse_calibration(doc);
        const Homography h = birdseye_homography(cal.quad, cal.side);
        const auto cfg = config_.update([&](const PipelineConfig& current) {
            PipelineConfig next = current;
            next.calibration = cal.quad;
            next.birdseye_side = cal.side;
            next.violation.space = DistanceSpace::BirdsEye;
            return next;
        });
        return {200,
                {{"homography", to_json(h)},
                 {"corners", corners_to_json(cal.quad)},
                 {"side", cal.side},
                 {"config", config_view(*cfg)}}};
    } catch (const ConfigError& e) {
        return error_response(422, e.what(), e.field());
    } catch (const DegenerateCalibration& e) {
        return error_response(422, std::string("degenerate calibration: ") + e.what(), "corners");
    } catch (const InvalidGeometry& e) {
        return error_response(422, e.what(), "side");
    }
}

ApiResponse RiskApi::latest_report() const
{
    const auto report = live_.latest_report();
    if (!report) return error_response(404, "no frame has been processed yet");
    return {200, to_json(*report)};
}

RiskService::RiskService(RiskApi& api, std::optional<std::filesystem::path> assets)
    : api_(api), server_(std::make_unique<httplib::Server>())
{
    // The library default adds SO_REUSEPORT, which lets a second server share
    // the port instead of failing to bind.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    auto reply = [](httplib::Response& res, const ApiResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    auto guarded = [reply](auto&& handler) {
        return [reply, handler](const httplib::Request& req, httplib::Response& res) {
            try {
                reply(res, handler(req));
            } catch (const std::exception& e) {
                reply(res, error_response(500, e.what()));
            }
        };
    };

    server_->Get("/api/stats", guarded([this](const httplib::Request&) { return api_.stats(); }));
    server_->Get("/api/series", guarded([this](const httplib::Request& req) {
        return api_.series({req.params.begin(), req.params.end()});
    }));
    server_->Get("/api/config", guarded([this](const httplib::Request&) { return api_.get_config(); }));
    server_->Put("/api/config", guarded([this](const httplib::Request& req) { return api_.put_config(req.body); }));
    server_->Post("/api/calibration",
                  guarded([this](const httplib::Request& req) { return api_.post_calibration(req.body); }));
    server_->Get("/api/report/latest",
                 guarded([this](const httplib::Request&) { return api_.latest_report(); }));

    std::error_code ec;
    if (assets && std::filesystem::is_directory(*assets, ec)) {
        server_->set_mount_point("/", assets->string());
    } else {
        server_->Get("/", guarded([](const httplib::Request&) {
            return ApiResponse{200,
                               {{"service", "socdist"},
                                {"endpoints", {"/api/stats", "/api/series", "/api/config",
                                               "/api/calibration", "/api/report/latest"}}}};
        }));
    }
}

RiskService::~RiskService() { stop(); }

int RiskService::bind(const std::string& host, int port)
{
    const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void RiskService::serve()
{
    serving_ = true;
    if (stop_requested_) {
        serving_ = false;
        return;
    }
    const bool clean = server_->listen_after_bind();
    serving_ = false;
    if (!clean && !stop_requested_) throw IoError("HTTP service stopped unexpectedly");
}

void RiskService::stop()
{
    stop_requested_ = true;
    // httplib ignores stop() until the accept loop is running.
    while (serving_ && !server_->is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    server_->stop();
}

LiveProcessor::LiveProcessor(std::filesystem::path detections, ConfigHandle& config, EventStore& store,
                             LiveState& live, Options options)
    : detections_(std::move(detections)), config_(config), store_(store), live_(live),
      options_(std::move(options))
{
}

LiveProcessor::~LiveProcessor()
{
    stop();
    join();
}

void LiveProcessor::start()
{
    if (worker_.joinable()) return;
    stop_ = false;
    worker_ = std::thread([this] { run(); });
}

void LiveProcessor::stop() { stop_ = true; }

void LiveProcessor::join()
{
    if (worker_.joinable()) worker_.join();
}

std::optional<std::string> LiveProcessor::failure() const
{
    std::lock_guard lock(failure_mutex_);
    return failure_;
}

void LiveProcessor::run()
{
    using clock = std::chrono::steady_clock;
    const auto started = clock::now();
    std::shared_ptr<const PipelineConfig> active;
    std::optional<FrameProcessor> processor;
    std::int64_t last_ts = 0;

    try {
        do {
            DetectionStream stream(detections_);
            while (!stop_) {
                auto fd = stream.next();
                if (!fd) break;
                auto snap = config_.snapshot();
                if (snap != active) {
                    processor.emplace(*snap);
                    active = std::move(snap);
                }
                const FrameReport report = processor->process(*fd);
                last_ts = std::max(last_ts, wall_clock_ms());
                store_.append({last_ts, report.frame_index, static_cast<std::int64_t>(report.violation_count),
                               static_cast<std::int64_t>(report.person_count), options_.run_id});
                const std::int64_t n = ++frames_;
                const std::chrono::duration<double> elapsed = clock::now() - started;
                live_.publish(report, elapsed.count() > 0 ? measure_fps(n, elapsed.count()) : 0.0);

                if (options_.pace_fps > 0) {
                    const auto due = started + std::chrono::duration_cast<clock::duration>(
                                                   std::chrono::duration<double>(n / options_.pace_fps));
                    while (!stop_ && clock::now() < due)
                        std::this_thread::sleep_for(std::min<clock::duration>(due - clock::now(),
                                                                              std::chrono::milliseconds(20)));
                }
            }
        } while (options_.loop && !stop_);
    } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex_);
        failure_ = e.what();
    }
}

}  // namespace socdist
