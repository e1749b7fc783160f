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

#ifndef EMOQ_ENGINE_HPP_
#define EMOQ_ENGINE_HPP_

#include <emoq/emotion.hpp>
#include <emoq/graph.hpp>
#include <emoq/lexicon.hpp>
#include <emoq/thresholds.hpp>

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace emoq {

struct EngineConfig {
    EmotionSet emotions = EmotionSet::nrc_default();
    ThresholdParams thresholds = ThresholdParams::defaults_for(EmotionSet::nrc_default());
    InfluenceWeights weights;
    std::size_t window_size = 100;
    std::size_t activity_window = 20;
    std::uint32_t reeval_limit = 10;
    // Admission checks start once the projected window holds this many comments.
    std::size_t min_basis = 5;
    // False: every comment publishes on arrival (the no-queue baseline).
    bool moderation_enabled = true;

    void validate() const;
};

enum class RevisionState { none, prompted, responded };

struct QueueEntry {
    NodeIndex node;
    std::uint64_t enqueue_seq;
    std::int64_t enqueue_time;
    std::uint32_t reeval_count = 0;
    RevisionState revision_state = RevisionState::none;
};

enum class EventKind {
    published,
    enqueued,
    released,
    revision_prompted,
    revision_resolved,
    suspended,
    thresholds_adjusted,
    idle_tick,
};

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> event_kind_from(std::string_view name) noexcept;

enum class RevisionKind { revised, unchanged, withdrawn };

std::string_view to_string(RevisionKind kind) noexcept;
std::optional<RevisionKind> revision_kind_from(std::string_view name) noexcept;

struct RevisionResponse {
    RevisionKind kind = RevisionKind::unchanged;
    std::string body;                    // revised text
    std::optional<EmotionVector> emotion;// scored with the engine lexicon when absent
};

/**
 * Audit record of one engine decision. Each comment state transition is
 * witnessed by exactly one event; board and thresholds are the values after
 * the event.
 */
struct EngineEvent {
    std::uint64_t seq = 0;
    EventKind kind = EventKind::published;
    std::int64_t time = 0;
    std::optional<std::string> comment_id;
    EmotionBoard board;
    std::vector<double> thresholds;

    std::optional<Comment> comment;         // published, enqueued, revision outcomes
    std::uint32_t reeval_count = 0;         // released, revision_prompted
    std::optional<RevisionKind> response;   // revision_resolved, suspended
    std::string reason;                     // suspended: "inadmissible" or "withdrawn"
};

enum class Decision { published, enqueued };
enum class RevisionOutcome { published, suspended, withdrawn };

std::string_view to_string(Decision d) noexcept;
std::string_view to_string(RevisionOutcome o) noexcept;

/// Result of testing one candidate against a board and limits.
struct Admission {
    bool admit = true;
    EmotionBoard projected;
    std::vector<EmotionIndex> worsened;// exceeded emotions the candidate pushes further up
};

/// Share rises below this many percentage points sit inside PageRank's
/// convergence error and are not counted as a rise.
inline constexpr double kShareTolerance = 1e-6;

/**
 * The admission rule: hold a candidate when its projected board exceeds a
 * limit on some emotion and raises that emotion's share by more than
 * kShareTolerance. Boards below `min_basis` comments are always admitted.
 */
bool violates_limits(const EmotionBoard& current,
                     const EmotionBoard& projected,
                     std::span<const double> limits,
                     std::size_t min_basis,
                     std::vector<EmotionIndex>* worsened = nullptr);

struct SubmitInput {
    Comment comment;
};
struct IdleTickInput {
    std::int64_t time = 0;
};
struct RevisionInput {
    std::string comment_id;
    RevisionResponse response;
    std::int64_t time = 0;
};
using EngineInput = std::variant<SubmitInput, IdleTickInput, RevisionInput>;

/**
 * Single-writer moderation engine for one conversation. All mutation goes
 * through submit / idle_tick / resolve_revision, which each append the
 * resulting events to the log; identical input streams yield identical logs.
 */
class Engine {
  public:
    explicit Engine(EngineConfig config, std::shared_ptr<const Lexicon> lexicon = nullptr);

    /// The first submission must be the root and always publishes. The
    /// comment's emotion is scored with the lexicon when left empty.
    Decision submit(Comment comment);
    const ThresholdSet& idle_tick(std::int64_t now);
    RevisionOutcome resolve_revision(const std::string& comment_id, RevisionResponse response, std::int64_t now);
    void apply(const EngineInput& input);

    /// One FIFO pass over the queue; returns released ids.
    std::vector<std::string> reevaluate_queue(std::int64_t now);
    /// Recomputes effective limits from the activity window and trend state.
    const ThresholdSet& adjust_thresholds(std::int64_t now);

    /// Side-effect free admission test against arbitrary limits.
    Admission evaluate(const Comment& candidate, std::span<const double> limits) const;
    Admission evaluate(const Comment& candidate) const { return evaluate(candidate, thresholds_.effective()); }

    EmotionVector score(std::string_view text) const;

    const EngineConfig& config() const noexcept { return config_; }
    const ConversationGraph& graph() const noexcept { return graph_; }
    const EmotionBoard& board() const noexcept { return tracker_.current(); }
    const ThresholdSet& thresholds() const noexcept { return thresholds_; }
    const std::deque<QueueEntry>& queue() const noexcept { return queue_; }
    std::span<const EngineEvent> events() const noexcept { return events_; }
    std::uint64_t seq() const noexcept { return seq_; }
    double activity_fraction() const noexcept;
    const QueueEntry* find_entry(std::string_view comment_id) const;

  private:
    void publish(NodeIndex node,
                 EventKind kind,
                 std::int64_t now,
                 const QueueEntry* entry,
                 std::optional<RevisionKind> response = std::nullopt);
    void record_activity(bool published);
    EngineEvent& emit(EventKind kind, std::int64_t now, std::optional<NodeIndex> node);
    std::vector<double> trend_penalties() const;
    void suspend(std::deque<QueueEntry>::iterator it, RevisionKind response, std::string reason, std::int64_t now);

    EngineConfig config_;
    std::shared_ptr<const Lexicon> lexicon_;
    ConversationGraph graph_;
    BoardTracker tracker_;
    ThresholdSet thresholds_;
    std::deque<QueueEntry> queue_;
    std::deque<bool> activity_;
    std::deque<std::vector<double>> share_history_;
    std::vector<EngineEvent> events_;
    std::uint64_t seq_ = 0;
};

}// namespace emoq

#endif// EMOQ_ENGINE_HPP_
