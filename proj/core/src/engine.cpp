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

#include <emoq/engine.hpp>
#include <emoq/error.hpp>

#include <algorithm>

namespace emoq {

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::published: return "published";
        case EventKind::enqueued: return "enqueued";
        case EventKind::released: return "released";
        case EventKind::revision_prompted: return "revision_prompted";
        case EventKind::revision_resolved: return "revision_resolved";
        case EventKind::suspended: return "suspended";
        case EventKind::thresholds_adjusted: return "thresholds_adjusted";
        case EventKind::idle_tick: return "idle_tick";
    }
    return "published";
}

std::optional<EventKind> event_kind_from(std::string_view name) noexcept {
    for (auto k : {EventKind::published, EventKind::enqueued, EventKind::released, EventKind::revision_prompted,
                   EventKind::revision_resolved, EventKind::suspended, EventKind::thresholds_adjusted,
                   EventKind::idle_tick}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::string_view to_string(RevisionKind kind) noexcept {
    switch (kind) {
        case RevisionKind::revised: return "revised";
        case RevisionKind::unchanged: return "unchanged";
        case RevisionKind::withdrawn: return "withdrawn";
    }
    return "unchanged";
}

std::optional<RevisionKind> revision_kind_from(std::string_view name) noexcept {
    for (auto k : {RevisionKind::revised, RevisionKind::unchanged, RevisionKind::withdrawn}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Decision d) noexcept { return d == Decision::published ? "published" : "enqueued"; }

std::string_view to_string(RevisionOutcome o) noexcept {
    switch (o) {
        case RevisionOutcome::published: return "published";
        case RevisionOutcome::suspended: return "suspended";
        case RevisionOutcome::withdrawn: return "withdrawn";
    }
    return "suspended";
}

void EngineConfig::validate() const {
    thresholds.validate(emotions.size());
    weights.validate();
    if (window_size == 0) {
        throw Error(ErrorCode::config_error, "window_size must be at least 1");
    }
    if (activity_window == 0) {
        throw Error(ErrorCode::config_error, "activity_window must be at least 1");
    }
    if (reeval_limit == 0) {
        throw Error(ErrorCode::config_error, "reeval_limit must be at least 1");
    }
}

bool violates_limits(const EmotionBoard& current,
                     const EmotionBoard& projected,
                     std::span<const double> limits,
                     std::size_t min_basis,
                     std::vector<EmotionIndex>* worsened) {
    if (projected.basis_count < min_basis) {
        return false;
    }
    bool violated = false;
    for (std::size_t e = 0; e < projected.shares.size(); ++e) {
        const double now = e < current.shares.size() ? current.shares[e] : 0.0;
        if (projected.shares[e] > limits[e] && projected.shares[e] > now + kShareTolerance) {
            violated = true;
            if (worsened) {
                worsened->push_back(e);
            }
        }
    }
    return violated;
}

Engine::Engine(EngineConfig config, std::shared_ptr<const Lexicon> lexicon)
    : config_(std::move(config)), lexicon_(std::move(lexicon)),
      tracker_(config_.emotions.size(), config_.weights, config_.window_size),
      thresholds_(config_.thresholds) {
    config_.validate();
    if (lexicon_ && !(lexicon_->emotions() == config_.emotions)) {
        throw Error(ErrorCode::config_error, "lexicon emotion set differs from the engine emotion set");
    }
}

EmotionVector Engine::score(std::string_view text) const {
    if (!lexicon_) {
        throw Error(ErrorCode::config_error, "engine has no lexicon to score text with");
    }
    return score_text(text, *lexicon_);
}

double Engine::activity_fraction() const noexcept {
    const auto window = static_cast<double>(config_.activity_window);
    const auto pubs = static_cast<double>(std::count(activity_.begin(), activity_.end(), true));
    const auto missing = window - static_cast<double>(activity_.size());
    return (pubs + 0.5 * missing) / window;
}

const QueueEntry* Engine::find_entry(std::string_view comment_id) const {
    const auto node = graph_.find(comment_id);
    if (!node) {
        return nullptr;
    }
    for (const auto& entry : queue_) {
        if (entry.node == *node) {
            return &entry;
        }
    }
    return nullptr;
}

EngineEvent& Engine::emit(EventKind kind, std::int64_t now, std::optional<NodeIndex> node) {
    EngineEvent ev;
    ev.seq = ++seq_;
    ev.kind = kind;
    ev.time = now;
    if (node) {
        ev.comment_id = graph_.node(*node).id;
    }
    ev.board = tracker_.current();
    ev.thresholds = thresholds_.effective();
    events_.push_back(std::move(ev));
    return events_.back();
}

void Engine::record_activity(bool published) {
    activity_.push_back(published);
    while (activity_.size() > config_.activity_window) {
        activity_.pop_front();
    }
}

std::vector<double> Engine::trend_penalties() const {
    std::vector<double> penalties(config_.emotions.size(), 0.0);
    const auto& p = config_.thresholds;
    if (!p.trend_enabled || share_history_.size() < 2) {
        return penalties;
    }
    const auto& oldest = share_history_.front();
    const auto& latest = share_history_.back();
    for (std::size_t e = 0; e < penalties.size(); ++e) {
        if (latest[e] - oldest[e] > p.trend_rise_pct) {
            penalties[e] = p.trend_penalty_pct;
        }
    }
    return penalties;
}

const ThresholdSet& Engine::adjust_thresholds(std::int64_t now) {
    if (thresholds_.update(activity_fraction(), trend_penalties())) {
        emit(EventKind::thresholds_adjusted, now, std::nullopt);
    }
    return thresholds_;
}

void Engine::publish(NodeIndex node,
                     EventKind kind,
                     std::int64_t now,
                     const QueueEntry* entry,
                     std::optional<RevisionKind> response) {
    graph_.publish(node);
    tracker_.on_publish(graph_, node);
    EngineEvent& ev = emit(kind, now, node);
    ev.response = response;
    if (kind != EventKind::released) {
        ev.comment = graph_.node(node);
    }
    if (entry) {
        ev.reeval_count = entry->reeval_count;
    }
    if (!graph_.parent(node)) {
        return;
    }
    record_activity(true);
    share_history_.push_back(tracker_.current().shares);
    while (share_history_.size() > config_.window_size) {
        share_history_.pop_front();
    }
    thresholds_.reset_idle();
    adjust_thresholds(now);
}

Admission Engine::evaluate(const Comment& candidate, std::span<const double> limits) const {
    Admission out;
    if (!config_.moderation_enabled || !candidate.parent_id) {
        return out;
    }
    out.projected = tracker_.project(graph_, candidate);
    out.admit = !violates_limits(tracker_.current(), out.projected, limits, config_.min_basis, &out.worsened);
    return out;
}

Decision Engine::submit(Comment comment) {
    if (comment.emotion.values.empty()) {
        comment.emotion = score(comment.body);
    }
    if (comment.emotion.size() != config_.emotions.size()) {
        throw Error(ErrorCode::config_error, "emotion vector of '" + comment.id + "' does not match the emotion set");
    }
    const bool is_root = graph_.empty();
    const std::int64_t now = comment.created_at;
    const NodeIndex node = graph_.add_comment(std::move(comment));
    if (is_root) {
        publish(node, EventKind::published, now, nullptr);
        return Decision::published;
    }
    if (evaluate(graph_.node(node)).admit) {
        publish(node, EventKind::published, now, nullptr);
        reevaluate_queue(now);
        return Decision::published;
    }
    graph_.set_state(node, CommentState::queued);
    EngineEvent& ev = emit(EventKind::enqueued, now, node);
    ev.comment = graph_.node(node);
    queue_.push_back(QueueEntry{node, ev.seq, now});
    record_activity(false);
    adjust_thresholds(now);
    return Decision::enqueued;
}

std::vector<std::string> Engine::reevaluate_queue(std::int64_t now) {
    std::vector<std::string> released;
    for (auto it = queue_.begin(); it != queue_.end();) {
        if (it->revision_state != RevisionState::none) {
            ++it;
            continue;
        }
        ++it->reeval_count;
        if (evaluate(graph_.node(it->node)).admit) {
            const QueueEntry entry = *it;
            it = queue_.erase(it);
            const auto offset = std::distance(queue_.begin(), it);
            publish(entry.node, EventKind::released, now, &entry);
            released.push_back(graph_.node(entry.node).id);
            it = queue_.begin() + offset;
            continue;
        }
        if (it->reeval_count >= config_.reeval_limit) {
            it->revision_state = RevisionState::prompted;
            graph_.set_state(it->node, CommentState::revision_requested);
            emit(EventKind::revision_prompted, now, it->node).reeval_count = it->reeval_count;
        }
        ++it;
    }
    return released;
}

const ThresholdSet& Engine::idle_tick(std::int64_t now) {
    emit(EventKind::idle_tick, now, std::nullopt);
    if (queue_.empty()) {
        return thresholds_;
    }
    record_activity(false);
    thresholds_.relax();
    adjust_thresholds(now);
    reevaluate_queue(now);
    return thresholds_;
}

void Engine::suspend(std::deque<QueueEntry>::iterator it, RevisionKind response, std::string reason, std::int64_t now) {
    const NodeIndex node = it->node;
    const std::uint32_t count = it->reeval_count;
    queue_.erase(it);
    graph_.set_state(node, CommentState::suspended);
    EngineEvent& ev = emit(EventKind::suspended, now, node);
    ev.comment = graph_.node(node);
    ev.reeval_count = count;
    ev.response = response;
    ev.reason = std::move(reason);
}

RevisionOutcome Engine::resolve_revision(const std::string& comment_id, RevisionResponse response, std::int64_t now) {
    const auto node = graph_.find(comment_id);
    auto it = queue_.end();
    if (node) {
        it = std::find_if(queue_.begin(), queue_.end(), [&](const QueueEntry& e) { return e.node == *node; });
    }
    if (it == queue_.end() || it->revision_state != RevisionState::prompted) {
        throw Error(ErrorCode::invalid_revision, "comment '" + comment_id + "' is not awaiting revision");
    }
    if (response.kind == RevisionKind::withdrawn) {
        suspend(it, RevisionKind::withdrawn, "withdrawn", now);
        return RevisionOutcome::withdrawn;
    }
    if (response.kind == RevisionKind::revised) {
        EmotionVector emotion = response.emotion ? *response.emotion : score(response.body);
        if (emotion.size() != config_.emotions.size()) {
            throw Error(ErrorCode::invalid_revision, "revised emotion vector does not match the emotion set");
        }
        graph_.replace_content(*node, std::move(response.body), std::move(emotion));
    }
    it->revision_state = RevisionState::responded;
    if (evaluate(graph_.node(*node)).admit) {
        const QueueEntry entry = *it;
        queue_.erase(it);
        publish(entry.node, EventKind::revision_resolved, now, &entry, response.kind);
        reevaluate_queue(now);
        return RevisionOutcome::published;
    }
    suspend(it, response.kind, "inadmissible", now);
    return RevisionOutcome::suspended;
}

void Engine::apply(const EngineInput& input) {
    std::visit(
        [this](const auto& in) {
            using T = std::decay_t<decltype(in)>;
            if constexpr (std::is_same_v<T, SubmitInput>) {
                submit(in.comment);
            } else if constexpr (std::is_same_v<T, IdleTickInput>) {
                idle_tick(in.time);
            } else {
                resolve_revision(in.comment_id, in.response, in.time);
            }
        },
        input);
}

}// namespace emoq
