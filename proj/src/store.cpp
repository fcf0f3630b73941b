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

#include "socdist/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <shared_mutex>

#include <json.hpp>

#include "socdist/errors.hpp"

namespace socdist {

namespace {

const std::string kHeaderLine = std::string(R"({"schema": ")") + kStoreSchema + "\"}";

std::int64_t event_int(const nlohmann::json& doc, const char* key, std::size_t line)
{
    const auto it = doc.find(key);
    if (it == doc.end() || !it->is_number_integer())
        throw StoreError("store line " + std::to_string(line) + ": field '" + key +
                         "' missing or not an integer");
    return it->get<std::int64_t>();
}

std::string errno_text() { return std::strerror(errno); }

void check_range(std::int64_t from, std::int64_t to)
{
    if (from > to)
        throw StoreError("bad range: from (" + std::to_string(from) + ") is after to (" +
                         std::to_string(to) + ")");
}

bool run_matches(const ViolationEvent& e, const std::optional<std::string>& run_id)
{
    return !run_id || e.run_id == *run_id;
}

}  // namespace

void ViolationEvent::validate() const
{
    if (frame_index < 0) throw StoreError("frame_index must be non-negative");
    if (person_count < 0) throw StoreError("person_count must be non-negative");
    if (violation_count < 0) throw StoreError("violation_count must be non-negative");
    const std::int64_t pairs = person_count * (person_count - 1) / 2;
    if (violation_count > pairs)
        throw StoreError("violation_count " + std::to_string(violation_count) + " exceeds the " +
                         std::to_string(pairs) + " pairs possible among " +
                         std::to_string(person_count) + " persons");
}

std::string format_event(const ViolationEvent& e)
{
    nlohmann::ordered_json doc = {{"timestamp", e.timestamp},
                                  {"frame_index", e.frame_index},
                                  {"violation_count", e.violation_count},
                                  {"person_count", e.person_count},
                                  {"run_id", e.run_id}};
    return doc.dump();
}

ViolationEvent parse_event(const std::string& line, std::size_t line_number)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw StoreError("store line " + std::to_string(line_number) + ": " + e.what());
    }
    if (!doc.is_object() || doc.size() != 5)
        throw StoreError("store line " + std::to_string(line_number) +
                         ": event must have exactly five fields");
    ViolationEvent e;
    e.timestamp = event_int(doc, "timestamp", line_number);
    e.frame_index = event_int(doc, "frame_index", line_number);
    e.violation_count = event_int(doc, "violation_count", line_number);
    e.person_count = event_int(doc, "person_count", line_number);
    const auto it = doc.find("run_id");
    if (it == doc.end() || !it->is_string())
        throw StoreError("store line " + std::to_string(line_number) + ": field 'run_id' must be a string");
    e.run_id = it->get<std::string>();
    return e;
}

std::vector<ViolationEvent> select_range(const std::vector<ViolationEvent>& events, std::int64_t from,
                                         std::int64_t to, const std::optional<std::string>& run_id)
{
    check_range(from, to);
    std::vector<ViolationEvent> out;
    std::copy_if(events.begin(), events.end(), std::back_inserter(out), [&](const ViolationEvent& e) {
        return e.timestamp >= from && e.timestamp < to && run_matches(e, run_id);
    });
    return out;
}

std::vector<SeriesBucket> bucketize(const std::vector<ViolationEvent>& events, std::int64_t from,
                                    std::int64_t to, std::int64_t width,
                                    const std::optional<std::string>& run_id)
{
    check_range(from, to);
    if (width <= 0) throw StoreError("bucket width must be positive");
    const std::int64_t span = to - from;
    const std::int64_t count = span / width + (span % width != 0 ? 1 : 0);
    if (count > 1'000'000) throw StoreError("too many buckets requested");

    std::vector<SeriesBucket> buckets(static_cast<std::size_t>(count));
    for (std::int64_t k = 0; k < count; ++k) buckets[k].bucket_start = from + k * width;
    for (const auto& e : events) {
        if (e.timestamp < from || e.timestamp >= to || !run_matches(e, run_id)) continue;
        auto& b = buckets[static_cast<std::size_t>((e.timestamp - from) / width)];
        b.violation_sum += e.violation_count;
        b.frame_count += 1;
        b.max_violations = std::max(b.max_violations, e.violation_count);
    }
    return buckets;
}

struct EventStore::State {
    std::filesystem::path path;
    Mode mode = Mode::ReadWrite;
    Durability durability = Durability::Fsync;
    int fd = -1;

    mutable std::shared_mutex mutex;
    mutable std::vector<ViolationEvent> events;
    mutable std::map<std::string, std::int64_t> last_timestamp;
    mutable std::uintmax_t offset = 0;  // bytes consumed; always at a line boundary
    mutable std::size_t lines = 0;
    mutable std::int64_t total_violations = 0;

    ~State()
    {
        if (fd >= 0) ::close(fd);
    }

    void reset() const
    {
        events.clear();
        last_timestamp.clear();
        offset = 0;
        lines = 0;
        total_violations = 0;
    }

    void absorb(const ViolationEvent& e) const
    {
        events.push_back(e);
        last_timestamp[e.run_id] = e.timestamp;
        total_violations += e.violation_count;
    }

    // Consumes every complete line past `offset`. Caller holds the lock.
    void load_new_records() const
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot read store '" + path.string() + "'");
        in.seekg(static_cast<std::streamoff>(offset));
        const std::string tail{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

        std::size_t pos = 0;
        while (true) {
            const std::size_t nl = tail.find('\n', pos);
            if (nl == std::string::npos) break;
            const std::string line = tail.substr(pos, nl - pos);
            ++lines;
            if (lines == 1) {
                nlohmann::json header;
                try {
                    header = nlohmann::json::parse(line);
                } catch (const nlohmann::json::parse_error&) {
                    throw StoreError("store '" + path.string() + "' has no schema header");
                }
                if (!header.is_object() || header.size() != 1 || header.value("schema", "") != kStoreSchema)
                    throw StoreError("store '" + path.string() + "' has an unsupported schema header");
            } else if (!line.empty()) {
                absorb(parse_event(line, lines));
            }
            pos = nl + 1;
        }
        offset += pos;
    }

    void sync() const
    {
        if (mode != Mode::ReadOnly) return;
        std::error_code ec;
        const auto size = std::filesystem::file_size(path, ec);
        if (ec) throw IoError("cannot stat store '" + path.string() + "': " + ec.message());
        {
            std::shared_lock lock(mutex);
            if (size == offset) return;
        }
        std::unique_lock lock(mutex);
        if (size < offset) reset();  // file replaced underneath us
        load_new_records();
    }
};

EventStore::EventStore(std::unique_ptr<State> state) : state_(std::move(state)) {}
EventStore::EventStore(EventStore&&) noexcept = default;
EventStore& EventStore::operator=(EventStore&&) noexcept = default;
EventStore::~EventStore() = default;

EventStore EventStore::open(const std::filesystem::path& path, Mode mode, Durability durability)
{
    auto st = std::make_unique<State>();
    st->path = path;
    st->mode = mode;
    st->durability = durability;

    if (mode == Mode::ReadOnly) {
        if (!std::filesystem::exists(path))
            throw IoError("store '" + path.string() + "' does not exist");
        st->load_new_records();
        return EventStore(std::move(st));
    }

    st->fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (st->fd < 0) throw IoError("cannot open store '" + path.string() + "': " + errno_text());

    st->load_new_records();
    const auto size = std::filesystem::file_size(path);
    if (size > st->offset) {
        // Torn trailing record from an interrupted append: never acknowledged.
        if (::ftruncate(st->fd, static_cast<off_t>(st->offset)) != 0)
            throw IoError("cannot truncate torn record in '" + path.string() + "': " + errno_text());
    }
    if (st->lines == 0) {
        const std::string header = kHeaderLine + "\n";
        if (::write(st->fd, header.data(), header.size()) != static_cast<ssize_t>(header.size()))
            throw IoError("cannot write store header: " + errno_text());
        if (durability == Durability::Fsync) ::fsync(st->fd);
        st->offset = header.size();
        st->lines = 1;
    }
    return EventStore(std::move(st));
}

void EventStore::append(const ViolationEvent& e)
{
    if (state_->mode == Mode::ReadOnly) throw StoreError("store opened read-only");
    e.validate();

    std::unique_lock lock(state_->mutex);
    const auto last = state_->last_timestamp.find(e.run_id);
    if (last != state_->last_timestamp.end() && e.timestamp < last->second)
        throw StoreError("timestamp " + std::to_string(e.timestamp) + " precedes " +
                         std::to_string(last->second) + " within run '" + e.run_id + "'");

    const std::string line = format_event(e) + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
        const ssize_t n = ::write(state_->fd, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            const std::string why = errno_text();
            // Drop the partial record so the log stays line-aligned.
            if (::ftruncate(state_->fd, static_cast<off_t>(state_->offset)) != 0)
                throw IoError("store append failed (" + why + ") and the torn record could not be removed");
            throw IoError("store append failed: " + why);
        }
        written += static_cast<std::size_t>(n);
    }
    if (state_->durability == Durability::Fsync && ::fsync(state_->fd) != 0)
        throw IoError("store fsync failed: " + errno_text());

    state_->offset += line.size();
    ++state_->lines;
    state_->absorb(e);
}

std::vector<ViolationEvent> EventStore::read_all() const
{
    state_->sync();
    std::shared_lock lock(state_->mutex);
    return state_->events;
}

std::vector<ViolationEvent> EventStore::query_range(std::int64_t from, std::int64_t to,
                                                    const std::optional<std::string>& run_id) const
{
    check_range(from, to);
    state_->sync();
    std::shared_lock lock(state_->mutex);
    return select_range(state_->events, from, to, run_id);
}

std::vector<SeriesBucket> EventStore::aggregate_series(std::int64_t from, std::int64_t to,
                                                       std::int64_t width,
                                                       const std::optional<std::string>& run_id) const
{
    check_range(from, to);
    state_->sync();
    std::shared_lock lock(state_->mutex);
    return bucketize(state_->events, from, to, width, run_id);
}

std::size_t EventStore::size() const
{
    state_->sync();
    std::shared_lock lock(state_->mutex);
    return state_->events.size();
}

std::int64_t EventStore::total_violations() const
{
    state_->sync();
    std::shared_lock lock(state_->mutex);
    return state_->total_violations;
}

std::optional<ViolationEvent> EventStore::latest() const
{
    state_->sync();
    std::shared_lock lock(state_->mutex);
    if (state_->events.empty()) return std::nullopt;
    return state_->events.back();
}

const std::filesystem::path& EventStore::path() const noexcept { return state_->path; }

}  // namespace socdist
