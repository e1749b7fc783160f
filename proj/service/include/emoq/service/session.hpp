/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#ifndef EMOQ_SERVICE_SESSION_HPP_
#define EMOQ_SERVICE_SESSION_HPP_

#include <emoq/config.hpp>
#include <emoq/engine.hpp>

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace emoq::service {

/// One user-facing notification. `json` is the complete serialized event.
struct ClientEvent {
    std::uint64_t seq = 0;
    std::string kind;
    std::uint64_t engine_seq = 0;
    std::string json;
};

/**
 * Append-only JSON-lines file. Every append is written with a single write
 * call and flushed to disk before it returns.
 */
class Journal {
  public:
    explicit Journal(const std::filesystem::path& path);
    ~Journal();
    Journal(const Journal&) = delete;
    Journal& operator=(const Journal&) = delete;

    void append(const std::vector<std::string>& lines);
    const std::filesystem::path& path() const noexcept { return path_; }

    /// Complete lines of an existing journal. A torn final line (no newline)
    /// is cut from the file.
    static std::vector<std::string> read_and_repair(const std::filesystem::path& path);

  private:
    std::filesystem::path path_;
    int fd_ = -1;
};

struct CommentRequest {
    std::optional<std::string> id;
    std::string parent_id;
    std::string author;
    std::string body;
    std::optional<std::int64_t> created_at;
};

struct CommentResult {
    Decision decision = Decision::published;
    std::string comment_id;
};

/**
 * One live conversation: an engine, its journal and the client event feed.
 * Commands are serialized by the session lock; each command's engine events
 * reach the journal before the call returns or any subscriber sees them.
 */
class Session {
  public:
    static std::shared_ptr<Session> create(std::string id,
                                           EngineSettings settings,
                                           std::shared_ptr<const Lexicon> lexicon,
                                           const std::filesystem::path& data_dir,
                                           Comment root);

    /// Rebuilds a session from `{id}.config.json` and `{id}.events.jsonl`,
    /// verifying that the replayed engine reproduces the journal exactly.
    static std::shared_ptr<Session> recover(std::string id,
                                            const std::filesystem::path& data_dir,
                                            std::shared_ptr<const Lexicon> lexicon,
                                            EngineSettings settings);

    CommentResult post(CommentRequest request, std::int64_t wall_now);
    RevisionOutcome revise(const std::string& ticket, RevisionResponse response, std::int64_t wall_now);
    /// Returns the ids released by the tick.
    std::vector<std::string> idle_tick(std::optional<std::int64_t> time, std::int64_t wall_now);

    const std::string& id() const noexcept { return id_; }
    std::string status_json() const;
    std::string state_json() const;
    std::string event_log() const;
    bool has_queue() const;
    std::chrono::steady_clock::time_point last_command() const;

    std::vector<ClientEvent> events_since(std::uint64_t seq) const;
    /// Blocks until an event after `seq` exists, the session closes or the timeout passes.
    bool wait_for(std::uint64_t seq, std::chrono::milliseconds timeout) const;
    void close();

    static std::filesystem::path config_path(const std::filesystem::path& dir, const std::string& id);
    static std::filesystem::path journal_path(const std::filesystem::path& dir, const std::string& id);

  private:
    Session(std::string id, EngineSettings settings, std::shared_ptr<const Lexicon> lexicon);

    /// Journals the engine events emitted since the last commit (skipping
    /// those already on disk) and publishes them to subscribers.
    void commit(std::size_t already_journaled);
    std::int64_t clock(std::optional<std::int64_t> requested, std::int64_t wall_now) const;

    std::string id_;
    EngineSettings settings_;
    Engine engine_;
    std::unique_ptr<Journal> journal_;
    std::size_t committed_ = 0;
    std::uint64_t next_comment_ = 1;
    std::chrono::steady_clock::time_point last_command_;

    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    bool closed_ = false;
    std::vector<ClientEvent> feed_;
};

struct CreateRequest {
    std::string root_id = "root";
    std::string author;
    std::string body;
    std::optional<std::int64_t> created_at;
    std::string overrides_json;// partial engine document, may be empty
    std::optional<std::string> conversation_id;
};

/// Conversation id to session. The registry lock only guards the map.
class SessionRegistry {
  public:
    SessionRegistry(EngineSettings defaults, std::filesystem::path data_dir);

    std::shared_ptr<Session> create(CreateRequest request, std::int64_t wall_now);
    /// Throws Error(not_found).
    std::shared_ptr<Session> get(const std::string& id) const;
    std::vector<std::shared_ptr<Session>> all() const;
    /// Loads every journal in the data directory; returns the number recovered.
    std::size_t recover();
    void close_all();

    const std::filesystem::path& data_dir() const noexcept { return data_dir_; }

  private:
    std::shared_ptr<const Lexicon> lexicon_for(const EngineSettings& settings);

    EngineSettings defaults_;
    std::filesystem::path data_dir_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::map<std::pair<std::string, std::string>, std::shared_ptr<const Lexicon>> lexicons_;
    std::uint64_t next_id_ = 1;
};

}// namespace emoq::service

#endif// EMOQ_SERVICE_SESSION_HPP_
