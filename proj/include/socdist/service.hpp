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
 * @file service.hpp
 * @brief HTTP risk-management API.
 *
 * Endpoints (all bodies are JSON):
 *
 *   GET  /api/stats                         latest frame summary, cumulative total, fps
 *   GET  /api/series?from=&to=&bucket=[&run_id=]   bucketed violation counts
 *   GET  /api/config                        current config view
 *   PUT  /api/config                        partial update, 422 on invalid fields
 *   POST /api/calibration                   {"corners": [[x,y] x4], "side"?} -> homography
 *   GET  /api/report/latest                 last processed FrameReport, 404 before any
 *   GET  /                                  static dashboard assets when configured
 *
 * Rejected requests never change state.
 */

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "socdist/pipeline.hpp"
#include "socdist/serialization.hpp"
#include "socdist/store.hpp"

namespace httplib {
class Server;
}

namespace socdist {

/// Shared configuration with snapshot semantics. Readers get an immutable
/// snapshot; writers swap in a fully validated replacement.
class ConfigHandle {
public:
    explicit ConfigHandle(PipelineConfig initial = {});

    std::shared_ptr<const PipelineConfig> snapshot() const;

    /// Serializes read-modify-write cycles. `fn` gets the current config and
    /// returns the replacement; if it throws, nothing changes.
    std::shared_ptr<const PipelineConfig> update(
        const std::function<PipelineConfig(const PipelineConfig&)>& fn);

private:
    mutable std::mutex read_mutex_;
    std::mutex write_mutex_;
    std::shared_ptr<const PipelineConfig> current_;
};

/// Most recent report from in-process frame processing.
class LiveState {
public:
    void publish(const FrameReport& report, double fps);
    std::optional<FrameReport> latest_report() const;
    double fps() const;

private:
    mutable std::mutex mutex_;
    std::optional<FrameReport> latest_;
    double fps_ = 0.0;
};

struct ApiResponse {
    int status = 200;
    Json body;
};

/// Request handlers, independent of the HTTP transport.
class RiskApi {
public:
    RiskApi(const EventStore& store, ConfigHandle& config, const LiveState& live);

    ApiResponse stats() const;
    ApiResponse series(const std::multimap<std::string, std::string>& params) const;
    ApiResponse get_config() const;
    ApiResponse put_config(const std::string& body);
    ApiResponse post_calibration(const std::string& body);
    ApiResponse latest_report() const;

private:
    const EventStore& store_;
    ConfigHandle& config_;
    const LiveState& live_;
};

class RiskService {
public:
    /// `assets` is served at `/` when it names an existing directory.
    RiskService(RiskApi& api, std::optional<std::filesystem::path> assets = std::nullopt);
    ~RiskService();

    RiskService(const RiskService&) = delete;
    RiskService& operator=(const RiskService&) = delete;

    /// Binds the socket. Port 0 picks a free port. Returns the bound port;
    /// throws IoError if the address is unavailable.
    int bind(const std::string& host, int port);
    /// Blocks serving requests until stop(). Returns at once if stop() came first.
    void serve();
    /// Safe from any thread, before or during serve().
    void stop();

private:
    RiskApi& api_;
    std::unique_ptr<httplib::Server> server_;
    std::atomic<bool> serving_{false};
    std::atomic<bool> stop_requested_{false};
};

/// Replays a detection-record stream through the pipeline using whatever
/// config is current at each frame, feeding the store and LiveState.
class LiveProcessor {
public:
    struct Options {
        double pace_fps = 30.0;  // <= 0 runs unthrottled
        bool loop = false;
        std::string run_id = "live";
    };

    LiveProcessor(std::filesystem::path detections, ConfigHandle& config, EventStore& store,
                  LiveState& live, Options options);
    ~LiveProcessor();

    void start();
    void stop();
    /// Blocks until the stream is exhausted (never returns while looping
    /// unless stopped).
    void join();

    std::int64_t frames_processed() const noexcept { return frames_.load(); }
    /// Message of the error that ended processing, if any.
    std::optional<std::string> failure() const;

private:
    void run();

    std::filesystem::path detections_;
    ConfigHandle& config_;
    EventStore& store_;
    LiveState& live_;
    Options options_;
    std::thread worker_;
    std::atomic<bool> stop_{false};
    std::atomic<std::int64_t> frames_{0};
    mutable std::mutex failure_mutex_;
    std::optional<std::string> failure_;
};

}  // namespace socdist
