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
 * @file store.hpp
 * @brief Append-only violation-event log with range and bucketed queries.
 *
 * On disk the log is one JSON object per line. The first line is the schema
 * header `{"schema": "violation-events/1"}`; every following line is one
 * ViolationEvent. A trailing line without a newline is an unacknowledged
 * append and is never returned to readers.
 *
 * One writer per file. Any number of readers (in-process or in other
 * processes) may query concurrently; read-only stores pick up records
 * appended by the writer on each query.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace socdist {

inline constexpr const char* kStoreSchema = "violation-events/1";

struct ViolationEvent {
    std::int64_t timestamp = 0;  // ms since epoch
    std::int64_t frame_index = 0;
    std::int64_t violation_count = 0;
    std::int64_t person_count = 0;
    std::string run_id;

    /// Throws StoreError on negative counts or more violations than pairs.
    void validate() const;

    friend bool operator==(const ViolationEvent&, const ViolationEvent&) = default;
};

struct SeriesBucket {
    std::int64_t bucket_start = 0;
    std::int64_t violation_sum = 0;
    std::int64_t frame_count = 0;
    std::int64_t max_violations = 0;

    friend bool operator==(const SeriesBucket&, const SeriesBucket&) = default;
};

std::string format_event(const ViolationEvent& e);
/// Strict parse: exactly the five event fields.
ViolationEvent parse_event(const std::string& line, std::size_t line_number);

class EventSink {
public:
    virtual ~EventSink() = default;
    virtual void append(const ViolationEvent& e) = 0;
};

/// Events within [from, to) whose run matches, in input order.
std::vector<ViolationEvent> select_range(const std::vector<ViolationEvent>& events, std::int64_t from,
                                         std::int64_t to,
                                         const std::optional<std::string>& run_id = std::nullopt);

/// Contiguous buckets [from + k*width, from + (k+1)*width) covering [from, to).
/// Events at or beyond `to` are excluded even when the last bucket is wider.
std::vector<SeriesBucket> bucketize(const std::vector<ViolationEvent>& events, std::int64_t from,
                                    std::int64_t to, std::int64_t width,
                                    const std::optional<std::string>& run_id = std::nullopt);

class EventStore final : public EventSink {
public:
    enum class Mode { ReadWrite, ReadOnly };
    /// Fsync flushes to stable storage on every append; Buffered hands the
    /// record to the kernel only, which survives process exit but not power loss.
    enum class Durability { Fsync, Buffered };

    /// ReadWrite creates the file (with header) if needed and drops any torn
    /// trailing record. ReadOnly requires the file to exist.
    static EventStore open(const std::filesystem::path& path, Mode mode = Mode::ReadWrite,
                           Durability durability = Durability::Fsync);

    EventStore(EventStore&&) noexcept;
    EventStore& operator=(EventStore&&) noexcept;
    ~EventStore() override;

    /// Durable on return. Rejects invalid events and timestamps that go
    /// backwards within a run before touching the file.
    void append(const ViolationEvent& e) override;

    std::vector<ViolationEvent> read_all() const;
    std::vector<ViolationEvent> query_range(std::int64_t from, std::int64_t to,
                                            const std::optional<std::string>& run_id = std::nullopt) const;
    std::vector<SeriesBucket> aggregate_series(std::int64_t from, std::int64_t to, std::int64_t width,
                                               const std::optional<std::string>& run_id = std::nullopt) const;

    std::size_t size() const;
    std::int64_t total_violations() const;
    std::optional<ViolationEvent> latest() const;

    const std::filesystem::path& path() const noexcept;

private:
    struct State;
    explicit EventStore(std::unique_ptr<State> state);

    std::unique_ptr<State> state_;
};

}  // namespace socdist
