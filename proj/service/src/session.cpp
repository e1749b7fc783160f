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

#include <emoq/error.hpp>
#include <emoq/event_log.hpp>
#include <emoq/service/session.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

namespace emoq::service {

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void io_failure(std::string_view what, const std::filesystem::path& path) {
    throw Error(ErrorCode::io_error, fmt::format("{} '{}': {}", what, path.string(), std::strerror(errno)));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::not_found, fmt::format("cannot open '{}'", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes through a temporary file and a rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) {
        io_failure("cannot create", tmp);
    }
    const bool ok = ::write(fd, text.data(), text.size()) == static_cast<ssize_t>(text.size()) && ::fsync(fd) == 0;
    ::close(fd);
    if (!ok) {
        io_failure("cannot write", tmp);
    }
    std::filesystem::rename(tmp, path);
}

bool valid_id(std::string_view id) {
    return !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '_';
    });
}

ojson board_json(const EmotionBoard& board, const std::vector<double>& thresholds, const EmotionSet& emotions) {
    ojson shares = ojson::object();
    ojson limits = ojson::object();
    for (std::size_t e = 0; e < emotions.size(); ++e) {
        shares[emotions.label(e)] = board.shares[e];
        limits[emotions.label(e)] = thresholds[e];
    }
    ojson out;
    out["basis"] = board.basis_count;
    out["shares"] = std::move(shares);
    out["thresholds"] = std::move(limits);
    return out;
}

/// User-facing notifications that follow the mirror of an engine event.
std::vector<std::pair<std::string, ojson>> derived_events(const EngineEvent& ev, const EmotionSet& emotions) {
    std::vector<std::pair<std::string, ojson>> out;
    const std::string id = ev.comment_id.value_or("");
    switch (ev.kind) {
        case EventKind::published:
        case EventKind::released:
        case EventKind::revision_resolved: {
            ojson p;
            p["comment_id"] = id;
            p["via"] = to_string(ev.kind);
            if (ev.kind != EventKind::published) {
                p["ticket"] = id;
            }
            out.emplace_back("comment_accepted", std::move(p));
            out.emplace_back("board_update", board_json(ev.board, ev.thresholds, emotions));
            break;
        }
        case EventKind::enqueued:
            out.emplace_back("comment_queued", ojson{{"comment_id", id}, {"ticket", id}});
            break;
        case EventKind::revision_prompted:
            out.emplace_back("revision_prompt", ojson{{"comment_id", id}, {"ticket", id}, {"reeval_count", ev.reeval_count}});
            break;
        case EventKind::suspended:
            out.emplace_back("comment_suspended", ojson{{"comment_id", id}, {"ticket", id}, {"reason", ev.reason}});
            break;
        case EventKind::thresholds_adjusted:
            out.emplace_back("board_update", board_json(ev.board, ev.thresholds, emotions));
            break;
        case EventKind::idle_tick: break;
    }
    return out;
}

std::string ticket_state(const EngineEvent& ev) {
    switch (ev.kind) {
        case EventKind::enqueued: return "queued";
        case EventKind::released: return "released";
        case EventKind::revision_prompted: return "revision_requested";
        case EventKind::revision_resolved: return "published";
        case EventKind::suspended: return ev.reason == "withdrawn" ? "withdrawn" : "suspended";
        default: return {};
    }
}

}// namespace

// Journal -------------------------------------------------------------------

Journal::Journal(const std::filesystem::path& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) {
        io_failure("cannot open journal", path);
    }
}

Journal::~Journal() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

void Journal::append(const std::vector<std::string>& lines) {
    if (lines.empty()) {
        return;
    }
    std::string buffer;
    for (const auto& line : lines) {
        buffer += line;
        buffer.push_back('\n');
    }
    std::size_t done = 0;
    while (done < buffer.size()) {
        const ssize_t n = ::write(fd_, buffer.data() + done, buffer.size() - done);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            io_failure("journal append failed for", path_);
        }
        done += static_cast<std::size_t>(n);
    }
    if (::fdatasync(fd_) != 0) {
        io_failure("journal sync failed for", path_);
    }
}

std::vector<std::string> Journal::read_and_repair(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const std::size_t end = text.rfind('\n');
    const std::size_t keep = end == std::string::npos ? 0 : end + 1;
    if (keep != text.size()) {
        const int fd = ::open(path.c_str(), O_WRONLY | O_CLOEXEC);
        const bool ok = fd >= 0 && ::ftruncate(fd, static_cast<off_t>(keep)) == 0 && ::fsync(fd) == 0;
        if (fd >= 0) {
            ::close(fd);
        }
        if (!ok) {
            io_failure("cannot repair journal", path);
        }
    }
    std::vector<std::string> lines;
    for (std::size_t start = 0; start < keep;) {
        const std::size_t nl = text.find('\n', start);
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

// Session -------------------------------------------------------------------

Session::Session(std::string id, EngineSettings settings, std::shared_ptr<const Lexicon> lexicon)
    : id_(std::move(id)), settings_(std::move(settings)), engine_(settings_.engine, std::move(lexicon)),
      last_command_(std::chrono::steady_clock::now()) {}

std::filesystem::path Session::config_path(const std::filesystem::path& dir, const std::string& id) {
    return dir / (id + ".config.json");
}

std::filesystem::path Session::journal_path(const std::filesystem::path& dir, const std::string& id) {
    return dir / (id + ".events.jsonl");
}

std::shared_ptr<Session> Session::create(std::string id,
                                         EngineSettings settings,
                                         std::shared_ptr<const Lexicon> lexicon,
                                         const std::filesystem::path& data_dir,
                                         Comment root) {
    if (!valid_id(id)) {
        throw Error(ErrorCode::config_error, fmt::format("conversation id '{}' must be 1-64 of [A-Za-z0-9_-]", id));
    }
    if (root.parent_id) {
        throw Error(ErrorCode::config_error, "a conversation root cannot reply to another comment");
    }
    std::shared_ptr<Session> s(new Session(std::move(id), std::move(settings), std::move(lexicon)));
    const auto journal = journal_path(data_dir, s->id_);
    if (std::filesystem::exists(journal)) {
        throw Error(ErrorCode::duplicate_id, fmt::format("conversation '{}' already exists", s->id_));
    }
    write_file_atomic(config_path(data_dir, s->id_), to_json(s->settings_) + "\n");
    s->journal_ = std::make_unique<Journal>(journal);
    std::lock_guard lock(s->mutex_);
    s->engine_.submit(std::move(root));
    s->commit(0);
    return s;
}

std::shared_ptr<Session> Session::recover(std::string id,
                                          const std::filesystem::path& data_dir,
                                          std::shared_ptr<const Lexicon> lexicon,
                                          EngineSettings settings) {
    const auto journal = journal_path(data_dir, id);
    const std::vector<std::string> lines = Journal::read_and_repair(journal);
    std::vector<EngineEvent> logged;
    logged.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            logged.push_back(parse_event_line(lines[i], settings.engine.emotions));
        } catch (const Error& e) {
            throw Error(ErrorCode::corrupt_journal, fmt::format("{}:{}: {}", journal.string(), i + 1, e.what()));
        }
    }
    std::shared_ptr<Session> s(new Session(std::move(id), std::move(settings), std::move(lexicon)));
    for (const auto& input : inputs_from_events(logged)) {
        s->engine_.apply(input);
    }
    const auto replayed = s->engine_.events();
    if (replayed.size() < lines.size()) {
        throw Error(ErrorCode::corrupt_journal, fmt::format("{}: replay produced {} events, journal holds {}",
                                                            journal.string(), replayed.size(), lines.size()));
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (to_json_line(replayed[i], s->settings_.engine.emotions) != lines[i]) {
            throw Error(ErrorCode::corrupt_journal,
                        fmt::format("{}:{}: replayed event differs from the journal", journal.string(), i + 1));
        }
    }
    s->journal_ = std::make_unique<Journal>(journal);
    std::lock_guard lock(s->mutex_);
    // A crash inside a command can leave only its leading events on disk;
    // the replay regenerated the rest, which are appended now.
    s->commit(lines.size());
    return s;
}

void Session::commit(std::size_t already_journaled) {
    const auto events = engine_.events();
    const EmotionSet& emotions = settings_.engine.emotions;
    std::vector<std::string> lines;
    for (std::size_t i = committed_; i < events.size(); ++i) {
        lines.push_back(to_json_line(events[i], emotions));
    }
    const std::size_t skip = already_journaled > committed_ ? already_journaled - committed_ : 0;
    journal_->append(std::vector<std::string>(lines.begin() + static_cast<std::ptrdiff_t>(std::min(skip, lines.size())),
                                              lines.end()));
    const auto push = [&](std::string kind, std::uint64_t engine_seq, ojson payload) {
        ClientEvent ce;
        ce.seq = feed_.size() + 1;
        ce.kind = std::move(kind);
        ce.engine_seq = engine_seq;
        ojson line;
        line["seq"] = ce.seq;
        line["conversation_id"] = id_;
        line["kind"] = ce.kind;
        line["engine_seq"] = engine_seq;
        line["payload"] = std::move(payload);
        ce.json = line.dump();
        feed_.push_back(std::move(ce));
    };
    for (std::size_t i = committed_; i < events.size(); ++i) {
        const EngineEvent& ev = events[i];
        push(std::string(to_string(ev.kind)), ev.seq, ojson::parse(lines[i - committed_]));
        for (auto& [kind, payload] : derived_events(ev, emotions)) {
            push(kind, ev.seq, std::move(payload));
        }
    }
    committed_ = events.size();
    changed_.notify_all();
}

std::int64_t Session::clock(std::optional<std::int64_t> requested, std::int64_t wall_now) const {
    const auto events = engine_.events();
    const std::int64_t last = events.empty() ? wall_now : events.back().time;
    return requested ? *requested : std::max(wall_now, last);
}

CommentResult Session::post(CommentRequest request, std::int64_t wall_now) {
    std::lock_guard lock(mutex_);
    if (closed_) {
        throw Error(ErrorCode::not_found, fmt::format("conversation '{}' is closed", id_));
    }
    if (request.parent_id.empty()) {
        throw Error(ErrorCode::config_error, "parent_id is required");
    }
    if (!engine_.graph().find(request.parent_id)) {
        throw Error(ErrorCode::not_found, fmt::format("parent '{}' does not exist", request.parent_id));
    }
    Comment c;
    if (request.id) {
        if (!valid_id(*request.id)) {
            throw Error(ErrorCode::config_error, fmt::format("comment id '{}' must be 1-64 of [A-Za-z0-9_-]", *request.id));
        }
        c.id = *request.id;
    } else {
        do {
            c.id = fmt::format("c{}", next_comment_++);
        } while (engine_.graph().find(c.id));
    }
    c.parent_id = std::move(request.parent_id);
    c.author = std::move(request.author);
    c.body = std::move(request.body);
    c.created_at = clock(request.created_at, wall_now);
    const std::string id = c.id;
    const Decision d = engine_.submit(std::move(c));
    commit(committed_);
    last_command_ = std::chrono::steady_clock::now();
    return CommentResult{d, id};
}

RevisionOutcome Session::revise(const std::string& ticket, RevisionResponse response, std::int64_t wall_now) {
    std::lock_guard lock(mutex_);
    if (!engine_.graph().find(ticket)) {
        throw Error(ErrorCode::not_found, fmt::format("ticket '{}' does not exist", ticket));
    }
    const RevisionOutcome out = engine_.resolve_revision(ticket, std::move(response), clock(std::nullopt, wall_now));
    commit(committed_);
    last_command_ = std::chrono::steady_clock::now();
    return out;
}

std::vector<std::string> Session::idle_tick(std::optional<std::int64_t> time, std::int64_t wall_now) {
    std::lock_guard lock(mutex_);
    const std::size_t before = engine_.events().size();
    engine_.idle_tick(clock(time, wall_now));
    commit(committed_);
    last_command_ = std::chrono::steady_clock::now();
    std::vector<std::string> released;
    const auto events = engine_.events();
    for (std::size_t i = before; i < events.size(); ++i) {
        if (events[i].kind == EventKind::released) {
            released.push_back(*events[i].comment_id);
        }
    }
    return released;
}

std::string Session::status_json() const {
    std::lock_guard lock(mutex_);
    const EmotionSet& emotions = settings_.engine.emotions;
    ojson out;
    out["conversation_id"] = id_;
    out["seq"] = engine_.seq();
    const ojson board = board_json(engine_.board(), engine_.thresholds().effective(), emotions);
    out["board"] = ojson{{"basis", board["basis"]}, {"shares", board["shares"]}};
    out["thresholds"] = board["thresholds"];
    out["queue_depth"] = engine_.queue().size();
    ojson tickets = ojson::array();
    std::map<std::string, std::size_t> slot;
    for (const auto& ev : engine_.events()) {
        const std::string state = ticket_state(ev);
        if (state.empty() || !ev.comment_id) {
            continue;
        }
        auto it = slot.find(*ev.comment_id);
        if (it == slot.end()) {
            it = slot.emplace(*ev.comment_id, tickets.size()).first;
            tickets.push_back(ojson{{"ticket", *ev.comment_id}, {"comment_id", *ev.comment_id}});
        }
        tickets[it->second]["state"] = state;
        tickets[it->second]["reeval_count"] = ev.reeval_count;
    }
    for (const auto& entry : engine_.queue()) {
        auto& t = tickets[slot.at(engine_.graph().node(entry.node).id)];
        t["reeval_count"] = entry.reeval_count;
    }
    out["tickets"] = std::move(tickets);
    return out.dump();
}

std::string Session::state_json() const {
    std::lock_guard lock(mutex_);
    return engine_state_json(engine_);
}

std::string Session::event_log() const {
    std::lock_guard lock(mutex_);
    std::ostringstream out;
    write_event_log(out, engine_.events(), settings_.engine.emotions);
    return out.str();
}

bool Session::has_queue() const {
    std::lock_guard lock(mutex_);
    return !engine_.queue().empty();
}

std::chrono::steady_clock::time_point Session::last_command() const {
    std::lock_guard lock(mutex_);
    return last_command_;
}

std::vector<ClientEvent> Session::events_since(std::uint64_t seq) const {
    std::lock_guard lock(mutex_);
    if (seq >= feed_.size()) {
        return {};
    }
    return {feed_.begin() + static_cast<std::ptrdiff_t>(seq), feed_.end()};
}

bool Session::wait_for(std::uint64_t seq, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    return changed_.wait_for(lock, timeout, [&] { return closed_ || feed_.size() > seq; }) && feed_.size() > seq;
}

void Session::close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    changed_.notify_all();
}

// SessionRegistry -----------------------------------------------------------

SessionRegistry::SessionRegistry(EngineSettings defaults, std::filesystem::path data_dir)
    : defaults_(std::move(defaults)), data_dir_(std::move(data_dir)) {
    std::error_code ec;
    std::filesystem::create_directories(data_dir_, ec);
    if (ec) {
        throw Error(ErrorCode::io_error, fmt::format("cannot create data directory '{}'", data_dir_.string()));
    }
    // Journals reference their lexicon by path, so store absolute ones.
    for (auto* p : {&defaults_.lexicon_path, &defaults_.emoji_path}) {
        if (!p->empty()) {
            *p = std::filesystem::absolute(*p);
        }
    }
}

std::shared_ptr<const Lexicon> SessionRegistry::lexicon_for(const EngineSettings& settings) {
    if (settings.lexicon_path.empty()) {
        throw Error(ErrorCode::config_error, "config key 'lexicon.words': a lexicon file is required");
    }
    const auto key = std::make_pair(settings.lexicon_path.string(), settings.emoji_path.string());
    std::unique_lock lock(mutex_);
    auto it = lexicons_.find(key);
    if (it != lexicons_.end() && it->second->emotions() == settings.engine.emotions) {
        return it->second;
    }
    auto lex = std::make_shared<const Lexicon>(
        load_lexicon(settings.lexicon_path, settings.emoji_path, settings.engine.emotions));
    lexicons_[key] = lex;
    return lex;
}

std::shared_ptr<Session> SessionRegistry::create(CreateRequest request, std::int64_t wall_now) {
    EngineSettings settings = defaults_;
    if (!request.overrides_json.empty()) {
        apply_overrides(settings, request.overrides_json, std::filesystem::current_path());
    }
    auto lexicon = lexicon_for(settings);
    std::string id;
    {
        std::unique_lock lock(mutex_);
        if (request.conversation_id) {
            id = *request.conversation_id;
            if (sessions_.count(id) != 0) {
                throw Error(ErrorCode::duplicate_id, fmt::format("conversation '{}' already exists", id));
            }
        } else {
            do {
                id = fmt::format("conv{}", next_id_++);
            } while (sessions_.count(id) != 0 || std::filesystem::exists(Session::journal_path(data_dir_, id)));
        }
        // Reserve the id so a concurrent create cannot take it.
        sessions_[id] = nullptr;
    }
    Comment root;
    root.id = request.root_id;
    root.author = std::move(request.author);
    root.body = std::move(request.body);
    root.created_at = request.created_at.value_or(wall_now);
    std::shared_ptr<Session> session;
    try {
        session = Session::create(id, std::move(settings), std::move(lexicon), data_dir_, std::move(root));
    } catch (...) {
        std::unique_lock lock(mutex_);
        sessions_.erase(id);
        throw;
    }
    std::unique_lock lock(mutex_);
    sessions_[id] = session;
    return session;
}

std::shared_ptr<Session> SessionRegistry::get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end() || !it->second) {
        throw Error(ErrorCode::not_found, fmt::format("conversation '{}' does not exist", id));
    }
    return it->second;
}

std::vector<std::shared_ptr<Session>> SessionRegistry::all() const {
    std::shared_lock lock(mutex_);
    std::vector<std::shared_ptr<Session>> out;
    for (const auto& [id, s] : sessions_) {
        if (s) {
            out.push_back(s);
        }
    }
    return out;
}

std::size_t SessionRegistry::recover() {
    std::vector<std::string> ids;
    for (const auto& entry : std::filesystem::directory_iterator(data_dir_)) {
        const std::string name = entry.path().filename().string();
        const std::string suffix = ".events.jsonl";
        if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            ids.push_back(name.substr(0, name.size() - suffix.size()));
        }
    }
    std::sort(ids.begin(), ids.end());
    std::size_t recovered = 0;
    for (const auto& id : ids) {
        {
            std::shared_lock lock(mutex_);
            if (sessions_.count(id) != 0) {
                continue;
            }
        }
        const auto config = Session::config_path(data_dir_, id);
        EngineSettings settings = parse_engine_settings(read_file(config), config.parent_path());
        auto lexicon = lexicon_for(settings);
        auto session = Session::recover(id, data_dir_, std::move(lexicon), std::move(settings));
        std::unique_lock lock(mutex_);
        sessions_[id] = std::move(session);
        ++recovered;
    }
    return recovered;
}

void SessionRegistry::close_all() {
    for (const auto& s : all()) {
        s->close();
    }
}

}// namespace emoq::service
