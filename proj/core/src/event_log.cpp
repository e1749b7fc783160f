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

#include <json.hpp>

#include <fstream>
#include <ostream>

namespace emoq {

namespace {

using ojson = nlohmann::ordered_json;

ojson per_emotion(const std::vector<double>& values, const EmotionSet& emotions) {
    ojson out = ojson::object();
    for (std::size_t e = 0; e < emotions.size() && e < values.size(); ++e) {
        out[emotions.label(e)] = values[e];
    }
    return out;
}

std::vector<double> per_emotion_from(const ojson& obj, const EmotionSet& emotions, std::string_view what) {
    if (!obj.is_object()) {
        throw Error(ErrorCode::parse_error, std::string(what) + " must be an object");
    }
    std::vector<double> out(emotions.size(), 0.0);
    for (const auto& [label, value] : obj.items()) {
        const auto idx = emotions.index_of(label);
        if (!idx || !value.is_number()) {
            throw Error(ErrorCode::parse_error, std::string(what) + " has unexpected entry '" + label + "'");
        }
        out[*idx] = value.get<double>();
    }
    return out;
}

ojson comment_json(const Comment& c, const EmotionSet& emotions) {
    ojson out;
    out["id"] = c.id;
    out["parent_id"] = c.parent_id ? ojson(*c.parent_id) : ojson(nullptr);
    out["author"] = c.author;
    out["body"] = c.body;
    out["created_at"] = c.created_at;
    out["emotion"] = per_emotion(c.emotion.values, emotions);
    return out;
}

Comment comment_from(const ojson& j, const EmotionSet& emotions) {
    Comment c;
    c.id = j.at("id").get<std::string>();
    if (!j.at("parent_id").is_null()) {
        c.parent_id = j.at("parent_id").get<std::string>();
    }
    c.author = j.at("author").get<std::string>();
    c.body = j.at("body").get<std::string>();
    c.created_at = j.at("created_at").get<std::int64_t>();
    c.emotion.values = per_emotion_from(j.at("emotion"), emotions, "comment emotion");
    return c;
}

}// namespace

std::string to_json_line(const EngineEvent& ev, const EmotionSet& emotions) {
    ojson out;
    out["seq"] = ev.seq;
    out["kind"] = to_string(ev.kind);
    out["time"] = ev.time;
    if (ev.comment_id) {
        out["comment_id"] = *ev.comment_id;
    }
    out["board"] = {{"basis", ev.board.basis_count}, {"shares", per_emotion(ev.board.shares, emotions)}};
    out["thresholds"] = per_emotion(ev.thresholds, emotions);
    if (ev.comment) {
        out["comment"] = comment_json(*ev.comment, emotions);
    }
    if (ev.kind == EventKind::released || ev.kind == EventKind::revision_prompted
        || ev.kind == EventKind::revision_resolved || ev.kind == EventKind::suspended) {
        out["reeval_count"] = ev.reeval_count;
    }
    if (ev.response) {
        out["response"] = to_string(*ev.response);
    }
    if (!ev.reason.empty()) {
        out["reason"] = ev.reason;
    }
    return out.dump();
}

EngineEvent parse_event_line(std::string_view line, const EmotionSet& emotions) {
    try {
        const ojson j = ojson::parse(line);
        EngineEvent ev;
        ev.seq = j.at("seq").get<std::uint64_t>();
        const auto kind = event_kind_from(j.at("kind").get<std::string>());
        if (!kind) {
            throw Error(ErrorCode::parse_error, "unknown event kind");
        }
        ev.kind = *kind;
        ev.time = j.at("time").get<std::int64_t>();
        if (auto it = j.find("comment_id"); it != j.end()) {
            ev.comment_id = it->get<std::string>();
        }
        const auto& board = j.at("board");
        ev.board.basis_count = board.at("basis").get<std::size_t>();
        ev.board.shares = per_emotion_from(board.at("shares"), emotions, "board shares");
        ev.thresholds = per_emotion_from(j.at("thresholds"), emotions, "thresholds");
        if (auto it = j.find("comment"); it != j.end()) {
            ev.comment = comment_from(*it, emotions);
        }
        if (auto it = j.find("reeval_count"); it != j.end()) {
            ev.reeval_count = it->get<std::uint32_t>();
        }
        if (auto it = j.find("response"); it != j.end()) {
            const auto r = revision_kind_from(it->get<std::string>());
            if (!r) {
                throw Error(ErrorCode::parse_error, "unknown revision response");
            }
            ev.response = *r;
        }
        if (auto it = j.find("reason"); it != j.end()) {
            ev.reason = it->get<std::string>();
        }
        return ev;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("malformed event line: ") + e.what());
    }
}

void write_event_log(std::ostream& out, std::span<const EngineEvent> events, const EmotionSet& emotions) {
    for (const auto& ev : events) {
        out << to_json_line(ev, emotions) << '\n';
    }
}

std::vector<EngineEvent> read_event_log(const std::filesystem::path& path, const EmotionSet& emotions) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::load_error, "cannot open event log '" + path.string() + "'");
    }
    std::vector<EngineEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            events.push_back(parse_event_line(line, emotions));
        } catch (const Error& e) {
            throw Error(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return events;
}

std::vector<EngineInput> inputs_from_events(std::span<const EngineEvent> events) {
    std::vector<EngineInput> inputs;
    for (const auto& ev : events) {
        switch (ev.kind) {
            case EventKind::published:
            case EventKind::enqueued:
                if (!ev.comment) {
                    throw Error(ErrorCode::parse_error, "submission event " + std::to_string(ev.seq) + " lacks its comment");
                }
                inputs.emplace_back(SubmitInput{*ev.comment});
                break;
            case EventKind::idle_tick: inputs.emplace_back(IdleTickInput{ev.time}); break;
            case EventKind::revision_resolved:
            case EventKind::suspended: {
                if (!ev.comment_id || !ev.response) {
                    throw Error(ErrorCode::parse_error, "revision event " + std::to_string(ev.seq) + " lacks its response");
                }
                RevisionInput in{*ev.comment_id, RevisionResponse{*ev.response, {}, std::nullopt}, ev.time};
                if (*ev.response == RevisionKind::revised) {
                    if (!ev.comment) {
                        throw Error(ErrorCode::parse_error, "revised event " + std::to_string(ev.seq) + " lacks its body");
                    }
                    in.response.body = ev.comment->body;
                    in.response.emotion = ev.comment->emotion;
                }
                inputs.emplace_back(std::move(in));
                break;
            }
            case EventKind::released:
            case EventKind::revision_prompted:
            case EventKind::thresholds_adjusted: break;
        }
    }
    return inputs;
}

std::string engine_state_json(const Engine& engine) {
    const EmotionSet& emotions = engine.config().emotions;
    const auto& graph = engine.graph();
    const auto& th = engine.thresholds();
    ojson out;
    out["seq"] = engine.seq();
    out["event_count"] = engine.events().size();
    out["board"] = {{"basis", engine.board().basis_count}, {"shares", per_emotion(engine.board().shares, emotions)}};
    out["thresholds"] = {{"effective", per_emotion(th.effective(), emotions)},
                         {"idle_offset", th.idle_offset()},
                         {"activity", th.activity()}};
    ojson queue = ojson::array();
    for (const auto& entry : engine.queue()) {
        queue.push_back({{"comment_id", graph.node(entry.node).id},
                         {"enqueue_seq", entry.enqueue_seq},
                         {"enqueue_time", entry.enqueue_time},
                         {"reeval_count", entry.reeval_count},
                         {"revision_state", entry.revision_state == RevisionState::none       ? "none"
                                            : entry.revision_state == RevisionState::prompted ? "prompted"
                                                                                              : "responded"}});
    }
    out["queue"] = std::move(queue);
    ojson comments = ojson::array();
    for (NodeIndex i = 0; i < graph.size(); ++i) {
        ojson c = comment_json(graph.node(i), emotions);
        c["state"] = to_string(graph.node(i).state);
        comments.push_back(std::move(c));
    }
    out["comments"] = std::move(comments);
    ojson order = ojson::array();
    for (const NodeIndex i : graph.publish_order()) {
        order.push_back(graph.node(i).id);
    }
    out["publish_order"] = std::move(order);
    return out.dump();
}

}// namespace emoq
