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
#include <emoq/replay.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace emoq::replay {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad_key(const std::string& key, std::string_view why) {
    throw Error(ErrorCode::config_error, "config key 'replay." + key + "': " + std::string(why));
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::load_error, "cannot open config '" + file.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<RevisionPolicy> policy_from(std::string_view name) {
    for (auto p : {RevisionPolicy::decline, RevisionPolicy::attenuate, RevisionPolicy::always_withdraw}) {
        if (to_string(p) == name) {
            return p;
        }
    }
    return std::nullopt;
}

void apply_replay_section(ReplayConfig& cfg, const json& section) {
    if (!section.is_object()) {
        throw Error(ErrorCode::config_error, "config key 'replay': expected an object");
    }
    for (const auto& [key, value] : section.items()) {
        if (key == "queue_enabled") {
            if (!value.is_boolean()) {
                bad_key(key, "expected a boolean");
            }
            cfg.queue_enabled = value.get<bool>();
        } else if (key == "revision_policy") {
            const auto p = value.is_string() ? policy_from(value.get<std::string>()) : std::nullopt;
            if (!p) {
                bad_key(key, "expected one of decline, attenuate, always_withdraw");
            }
            cfg.revision_policy = *p;
        } else if (key == "attenuate_factor") {
            if (!value.is_number()) {
                bad_key(key, "expected a number");
            }
            cfg.attenuate_factor = value.get<double>();
        } else if (key == "idle_gap_seconds" || key == "histogram_bin_seconds") {
            if (!value.is_number_integer()) {
                bad_key(key, "expected an integer");
            }
            (key == "idle_gap_seconds" ? cfg.idle_gap_seconds : cfg.histogram_bin_seconds) = value.get<std::int64_t>();
        } else if (key == "rng_seed") {
            if (!value.is_number_unsigned()) {
                bad_key(key, "expected a non-negative integer");
            }
            cfg.rng_seed = value.get<std::uint64_t>();
        } else if (key == "display_aliases") {
            if (!value.is_object()) {
                bad_key(key, "expected an object of label to display name");
            }
            for (const auto& [label, name] : value.items()) {
                if (!name.is_string()) {
                    bad_key(key + "." + label, "expected a string");
                }
                cfg.display_aliases[label] = name.get<std::string>();
            }
        } else {
            bad_key(key, "unknown key");
        }
    }
}

Comment to_comment(const CorpusRecord& r) {
    Comment c;
    c.id = r.id;
    c.author = r.author;
    c.body = r.body;
    c.created_at = r.created_utc;
    if (!r.parent_id.empty()) {
        c.parent_id = r.parent_id;
    }
    return c;
}

/// Keeps floor(factor * hits) of the emotional tokens, in their original order.
std::string attenuate(std::string_view body, double factor, const Lexicon& lexicon) {
    const auto tokens = tokenize(body);
    std::size_t hits = 0;
    for (const auto& t : tokens) {
        hits += lexicon.lookup(t) != 0 ? 1 : 0;
    }
    auto keep = static_cast<std::size_t>(std::floor(factor * static_cast<double>(hits)));
    std::string out;
    for (const auto& t : tokens) {
        if (lexicon.lookup(t) != 0) {
            if (keep == 0) {
                continue;
            }
            --keep;
        }
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += t;
    }
    return out;
}

class Driver {
  public:
    Driver(const ReplayConfig& cfg, std::shared_ptr<const Lexicon> lexicon) : cfg_(cfg), lexicon_(lexicon) {
        EngineConfig ec = cfg.engine.engine;
        ec.moderation_enabled = cfg.queue_enabled;
        engine_.emplace(std::move(ec), std::move(lexicon));
    }

    void submit(const CorpusRecord& r) {
        engine_->submit(to_comment(r));
        answer_prompts(r.created_utc);
    }

    void tick(std::int64_t t) {
        engine_->idle_tick(t);
        answer_prompts(t);
    }

    const Engine& engine() const { return *engine_; }

  private:
    void answer_prompts(std::int64_t now) {
        while (scanned_ < engine_->events().size()) {
            const EngineEvent ev = engine_->events()[scanned_++];
            if (ev.kind != EventKind::revision_prompted) {
                continue;
            }
            RevisionResponse response;
            switch (cfg_.revision_policy) {
                case RevisionPolicy::decline: response.kind = RevisionKind::unchanged; break;
                case RevisionPolicy::always_withdraw: response.kind = RevisionKind::withdrawn; break;
                case RevisionPolicy::attenuate:
                    response.kind = RevisionKind::revised;
                    response.body = attenuate(engine_->graph().at(*ev.comment_id).body, cfg_.attenuate_factor, *lexicon_);
                    break;
            }
            engine_->resolve_revision(*ev.comment_id, std::move(response), now);
        }
    }

    const ReplayConfig& cfg_;
    std::shared_ptr<const Lexicon> lexicon_;
    std::optional<Engine> engine_;
    std::size_t scanned_ = 0;
};

EmotionSummary summarize_emotion(const std::vector<TrajectorySample>& trajectory, const std::vector<std::size_t>& members) {
    EmotionSummary s;
    if (trajectory.empty()) {
        return s;
    }
    double sum = 0.0;
    for (const auto& sample : trajectory) {
        double share = 0.0;
        for (const auto e : members) {
            share += sample.shares[e];
        }
        sum += share;
        s.zone_occupancy[static_cast<std::size_t>(zone_of(share))] += 1.0;
    }
    const auto n = static_cast<double>(trajectory.size());
    s.mean_share = sum / n;
    for (auto& z : s.zone_occupancy) {
        z /= n;
    }
    return s;
}

std::vector<HistogramBin> histogram_of(const std::vector<CommentOutcome>& outcomes, std::int64_t bin) {
    std::vector<HistogramBin> bins;
    for (const auto& o : outcomes) {
        if (o.kind != OutcomeKind::held) {
            continue;
        }
        const auto k = static_cast<std::size_t>(o.hold_seconds / bin);
        while (bins.size() <= k) {
            const auto start = static_cast<std::int64_t>(bins.size()) * bin;
            bins.push_back(HistogramBin{start, start + bin, 0});
        }
        ++bins[k].count;
    }
    return bins;
}

/// Display groups after aliasing: name plus the engine emotions merged into it.
std::vector<std::pair<std::string, std::vector<std::size_t>>> display_groups(
    const EmotionSet& emotions, const std::map<std::string, std::string>& aliases) {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
    for (std::size_t e = 0; e < emotions.size(); ++e) {
        const auto it = aliases.find(emotions.label(e));
        const std::string name = it == aliases.end() ? emotions.label(e) : it->second;
        auto g = std::find_if(groups.begin(), groups.end(), [&](const auto& p) { return p.first == name; });
        if (g == groups.end()) {
            groups.emplace_back(name, std::vector<std::size_t>{e});
        } else {
            g->second.push_back(e);
        }
    }
    return groups;
}

ojson zones_json(const std::array<double, 3>& z) {
    ojson out;
    out["low"] = z[0];
    out["medium"] = z[1];
    out["high"] = z[2];
    return out;
}

ojson summary_json(const ReplaySummary& s) {
    ojson out;
    out["total"] = s.total;
    out["held"] = s.held;
    out["suspended"] = s.suspended;
    out["withdrawn"] = s.withdrawn;
    out["held_fraction"] = s.held_fraction;
    out["mean_hold_seconds"] = s.mean_hold_seconds;
    out["max_hold_seconds"] = s.max_hold_seconds;
    return out;
}

ojson histogram_json(const std::vector<HistogramBin>& bins) {
    ojson out = ojson::array();
    for (const auto& b : bins) {
        out.push_back(ojson{{"bin_start_seconds", b.start}, {"bin_end_seconds", b.end}, {"count", b.count}});
    }
    return out;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::io_error, "cannot write '" + file.string() + "'");
    }
    out << text;
    out.flush();
    if (!out) {
        throw Error(ErrorCode::io_error, "write to '" + file.string() + "' failed");
    }
}

void make_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error(ErrorCode::io_error, "cannot create output directory '" + dir.string() + "'");
    }
}

}// namespace

std::string_view to_string(RevisionPolicy policy) noexcept {
    switch (policy) {
        case RevisionPolicy::decline: return "decline";
        case RevisionPolicy::attenuate: return "attenuate";
        case RevisionPolicy::always_withdraw: return "always_withdraw";
    }
    return "decline";
}

std::string_view to_string(OutcomeKind kind) noexcept {
    switch (kind) {
        case OutcomeKind::published_immediately: return "published_immediately";
        case OutcomeKind::held: return "held";
        case OutcomeKind::suspended: return "suspended";
        case OutcomeKind::withdrawn: return "withdrawn";
    }
    return "published_immediately";
}

void ReplayConfig::validate() const {
    engine.engine.validate();
    if (!(attenuate_factor > 0.0 && attenuate_factor < 1.0)) {
        throw Error(ErrorCode::config_error, "config key 'replay.attenuate_factor': must lie in (0, 1)");
    }
    if (idle_gap_seconds <= 0) {
        throw Error(ErrorCode::config_error, "config key 'replay.idle_gap_seconds': must be positive");
    }
    if (histogram_bin_seconds <= 0) {
        throw Error(ErrorCode::config_error, "config key 'replay.histogram_bin_seconds': must be positive");
    }
    for (const auto& [label, name] : display_aliases) {
        if (!engine.engine.emotions.contains(label)) {
            throw Error(ErrorCode::config_error, "config key 'replay.display_aliases." + label + "': not in the emotion set");
        }
        if (name.empty()) {
            throw Error(ErrorCode::config_error, "config key 'replay.display_aliases." + label + "': empty name");
        }
    }
}

ReplayConfig parse_replay_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    ReplayConfig cfg;
    cfg.engine = parse_engine_settings(json_text, base_dir, {"replay"});
    const json doc = json::parse(json_text, nullptr, false);
    if (doc.is_object() && doc.contains("replay")) {
        apply_replay_section(cfg, doc.at("replay"));
    }
    cfg.validate();
    return cfg;
}

ReplayConfig load_replay_config(const std::filesystem::path& file) {
    return parse_replay_config(read_file(file), file.parent_path());
}

ReplayReport run_replay(const std::vector<CorpusRecord>& records,
                        const ReplayConfig& config,
                        std::shared_ptr<const Lexicon> lexicon) {
    config.validate();
    if (!lexicon) {
        throw Error(ErrorCode::config_error, "replay needs a lexicon");
    }
    Driver driver(config, lexicon);
    std::optional<std::int64_t> last;
    for (const auto& r : records) {
        if (last && r.created_utc - *last > config.idle_gap_seconds) {
            driver.tick(*last + config.idle_gap_seconds);
        }
        driver.submit(r);
        last = r.created_utc;
    }
    // Drain: keep ticking until every held comment has left the queue. Each
    // tick advances every waiting entry towards its prompt, so this ends.
    for (std::int64_t t = last.value_or(0); !driver.engine().queue().empty();) {
        t += config.idle_gap_seconds;
        driver.tick(t);
    }
    ReplayReport report = report_from_events(driver.engine().events(), config.engine.engine.emotions,
                                             config.histogram_bin_seconds, config.queue_enabled);
    report.display_aliases = config.display_aliases;
    return report;
}

std::vector<EngineEvent> run_inputs(std::span<const EngineInput> inputs,
                                    const EngineConfig& config,
                                    std::shared_ptr<const Lexicon> lexicon) {
    Engine engine(config, std::move(lexicon));
    for (const auto& in : inputs) {
        engine.apply(in);
    }
    return {engine.events().begin(), engine.events().end()};
}

ReplayReport report_from_events(std::span<const EngineEvent> events,
                                const EmotionSet& emotions,
                                std::int64_t histogram_bin_seconds,
                                bool queue_enabled) {
    if (histogram_bin_seconds <= 0) {
        throw Error(ErrorCode::config_error, "histogram bin width must be positive");
    }
    ReplayReport report;
    report.emotions = emotions;
    report.queue_enabled = queue_enabled;
    std::unordered_map<std::string, std::size_t> slot;
    std::unordered_map<std::string, std::int64_t> created;
    for (const auto& ev : events) {
        const bool publication = ev.kind == EventKind::published || ev.kind == EventKind::released ||
                                 ev.kind == EventKind::revision_resolved;
        if (publication) {
            report.trajectory.push_back(TrajectorySample{ev.seq, ev.board.shares});
        }
        if (!ev.comment_id) {
            continue;
        }
        const std::string& id = *ev.comment_id;
        switch (ev.kind) {
            case EventKind::published:
            case EventKind::enqueued: {
                if (report.root_id.empty() && ev.comment && !ev.comment->parent_id) {
                    report.root_id = id;
                }
                slot[id] = report.outcomes.size();
                created[id] = ev.comment ? ev.comment->created_at : ev.time;
                CommentOutcome o;
                o.id = id;
                o.kind = ev.kind == EventKind::published ? OutcomeKind::published_immediately : OutcomeKind::held;
                report.outcomes.push_back(std::move(o));
                break;
            }
            case EventKind::released:
            case EventKind::revision_resolved:
            case EventKind::suspended: {
                const auto it = slot.find(id);
                if (it == slot.end()) {
                    throw Error(ErrorCode::corrupt_journal, "event " + std::to_string(ev.seq) + " names unseen comment '" + id + "'");
                }
                CommentOutcome& o = report.outcomes[it->second];
                o.hold_seconds = ev.time - created[id];
                o.reeval_count = ev.reeval_count;
                if (ev.kind == EventKind::suspended) {
                    o.kind = ev.reason == "withdrawn" ? OutcomeKind::withdrawn : OutcomeKind::suspended;
                }
                break;
            }
            default: break;
        }
    }

    ReplaySummary& s = report.summary;
    s.total = report.outcomes.size();
    std::int64_t hold_sum = 0;
    for (const auto& o : report.outcomes) {
        switch (o.kind) {
            case OutcomeKind::held:
                ++s.held;
                hold_sum += o.hold_seconds;
                s.max_hold_seconds = std::max(s.max_hold_seconds, o.hold_seconds);
                break;
            case OutcomeKind::suspended: ++s.suspended; break;
            case OutcomeKind::withdrawn: ++s.withdrawn; break;
            case OutcomeKind::published_immediately: break;
        }
    }
    if (s.total > 0) {
        s.held_fraction = static_cast<double>(s.held + s.suspended + s.withdrawn) / static_cast<double>(s.total);
    }
    if (s.held > 0) {
        s.mean_hold_seconds = static_cast<double>(hold_sum) / static_cast<double>(s.held);
    }
    for (std::size_t e = 0; e < emotions.size(); ++e) {
        s.emotions.push_back(summarize_emotion(report.trajectory, {e}));
    }
    report.histogram = histogram_of(report.outcomes, histogram_bin_seconds);
    report.histogram_bin_seconds = histogram_bin_seconds;
    report.events.assign(events.begin(), events.end());
    return report;
}

Comparison compare_runs(const ReplayReport& with_queue, const ReplayReport& without_queue) {
    const bool same_ids = std::equal(with_queue.outcomes.begin(), with_queue.outcomes.end(),
                                     without_queue.outcomes.begin(), without_queue.outcomes.end(),
                                     [](const CommentOutcome& a, const CommentOutcome& b) { return a.id == b.id; });
    if (!same_ids) {
        throw Error(ErrorCode::mismatch, fmt::format("reports cover different corpora ({} vs {} comments)",
                                                     with_queue.outcomes.size(), without_queue.outcomes.size()));
    }
    if (!(with_queue.emotions == without_queue.emotions)) {
        throw Error(ErrorCode::mismatch, "reports use different emotion sets");
    }
    Comparison c;
    c.emotions = with_queue.emotions;
    for (std::size_t e = 0; e < c.emotions.size(); ++e) {
        const auto& a = with_queue.summary.emotions[e];
        const auto& b = without_queue.summary.emotions[e];
        EmotionDelta d;
        d.mean_share = a.mean_share - b.mean_share;
        for (std::size_t z = 0; z < 3; ++z) {
            d.zone_occupancy[z] = a.zone_occupancy[z] - b.zone_occupancy[z];
        }
        c.deltas.push_back(d);
    }
    c.held_fraction = with_queue.summary.held_fraction;
    c.mean_hold_seconds = with_queue.summary.mean_hold_seconds;
    c.max_hold_seconds = with_queue.summary.max_hold_seconds;
    c.histogram = with_queue.histogram;
    c.with_queue = with_queue.summary;
    c.without_queue = without_queue.summary;
    return c;
}

void emit_report(const ReplayReport& report, const std::filesystem::path& out_dir) {
    make_dir(out_dir);
    const auto groups = display_groups(report.emotions, report.display_aliases);

    ojson summary;
    summary["queue_enabled"] = report.queue_enabled;
    summary["root_id"] = report.root_id;
    const ojson totals = summary_json(report.summary);
    for (const auto& [key, value] : totals.items()) {
        summary[key] = value;
    }
    summary["per_thread_mean_hold_seconds"] = ojson::object();
    if (!report.root_id.empty()) {
        summary["per_thread_mean_hold_seconds"][report.root_id] = report.summary.mean_hold_seconds;
    }
    ojson per = ojson::object();
    for (const auto& [name, members] : groups) {
        const EmotionSummary es = summarize_emotion(report.trajectory, members);
        per[name] = ojson{{"mean_share", es.mean_share}, {"zone_occupancy", zones_json(es.zone_occupancy)}};
    }
    summary["emotions"] = std::move(per);
    summary["histogram_bin_seconds"] = report.histogram_bin_seconds;
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");

    std::string outcomes = "id,outcome,duration_seconds,reeval_count\n";
    for (const auto& o : report.outcomes) {
        outcomes += fmt::format("{},{},{},{}\n", o.id, to_string(o.kind), o.hold_seconds, o.reeval_count);
    }
    write_text(out_dir / "outcomes.csv", outcomes);

    std::string trajectory = "seq,emotion,share,zone\n";
    for (const auto& sample : report.trajectory) {
        for (const auto& [name, members] : groups) {
            double share = 0.0;
            for (const auto e : members) {
                share += sample.shares[e];
            }
            trajectory += fmt::format("{},{},{},{}\n", sample.seq, name, share, to_string(zone_of(share)));
        }
    }
    write_text(out_dir / "trajectory.csv", trajectory);

    std::string histogram = "bin_start_seconds,bin_end_seconds,count\n";
    for (const auto& b : report.histogram) {
        histogram += fmt::format("{},{},{}\n", b.start, b.end, b.count);
    }
    write_text(out_dir / "hold_histogram.csv", histogram);

    std::ostringstream events;
    write_event_log(events, report.events, report.emotions);
    write_text(out_dir / "events.jsonl", events.str());
}

void emit_comparison(const Comparison& comparison,
                     const ReplayReport& with_queue,
                     const ReplayReport& without_queue,
                     const std::filesystem::path& out_dir) {
    make_dir(out_dir);
    emit_report(with_queue, out_dir / "with_queue");
    emit_report(without_queue, out_dir / "without_queue");

    ojson out;
    ojson deltas = ojson::object();
    for (std::size_t e = 0; e < comparison.emotions.size(); ++e) {
        const auto& d = comparison.deltas[e];
        deltas[comparison.emotions.label(e)] =
            ojson{{"mean_share", d.mean_share}, {"zone_occupancy", zones_json(d.zone_occupancy)}};
    }
    out["deltas"] = std::move(deltas);
    out["held_fraction"] = comparison.held_fraction;
    out["mean_hold_seconds"] = comparison.mean_hold_seconds;
    out["max_hold_seconds"] = comparison.max_hold_seconds;
    out["hold_histogram"] = histogram_json(comparison.histogram);
    out["with_queue"] = summary_json(comparison.with_queue);
    out["without_queue"] = summary_json(comparison.without_queue);
    write_text(out_dir / "comparison.json", out.dump(2) + "\n");
}

}// namespace emoq::replay
