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

#ifndef EMOQ_REPLAY_HPP_
#define EMOQ_REPLAY_HPP_

#include <emoq/config.hpp>
#include <emoq/corpus.hpp>
#include <emoq/engine.hpp>
#include <emoq/lexicon.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace emoq::replay {

/// How the harness answers revision prompts, standing in for absent authors.
enum class RevisionPolicy { decline, attenuate, always_withdraw };

std::string_view to_string(RevisionPolicy policy) noexcept;

struct ReplayConfig {
    bool queue_enabled = true;
    EngineSettings engine;
    RevisionPolicy revision_policy = RevisionPolicy::decline;
    double attenuate_factor = 0.5;       // share of emotional tokens a revision keeps
    std::int64_t idle_gap_seconds = 300; // one idle tick per inter-arrival gap above this
    std::int64_t histogram_bin_seconds = 5;
    std::uint64_t rng_seed = 1;          // synthetic generation only
    // Display-only renames or merges applied when reports are written.
    std::map<std::string, std::string> display_aliases;

    void validate() const;
};

/// Reads the engine document plus an optional "replay" section.
ReplayConfig load_replay_config(const std::filesystem::path& file);
ReplayConfig parse_replay_config(std::string_view json_text, const std::filesystem::path& base_dir = {});

enum class OutcomeKind { published_immediately, held, suspended, withdrawn };

std::string_view to_string(OutcomeKind kind) noexcept;

struct CommentOutcome {
    std::string id;
    OutcomeKind kind = OutcomeKind::published_immediately;
    std::int64_t hold_seconds = 0;
    std::uint32_t reeval_count = 0;
};

struct TrajectorySample {
    std::uint64_t seq = 0;
    std::vector<double> shares;
};

struct HistogramBin {
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::size_t count = 0;
};

struct EmotionSummary {
    double mean_share = 0.0;
    std::array<double, 3> zone_occupancy{};// low, medium, high
};

struct ReplaySummary {
    std::size_t total = 0;
    std::size_t held = 0;// released after a hold, including revised publications
    std::size_t suspended = 0;
    std::size_t withdrawn = 0;
    double held_fraction = 0.0;// (held + suspended + withdrawn) / total
    double mean_hold_seconds = 0.0;
    std::int64_t max_hold_seconds = 0;
    std::vector<EmotionSummary> emotions;
};

struct ReplayReport {
    EmotionSet emotions = EmotionSet::nrc_default();
    std::string root_id;
    bool queue_enabled = true;
    std::vector<CommentOutcome> outcomes;// corpus order
    std::vector<TrajectorySample> trajectory;
    std::vector<HistogramBin> histogram;
    std::int64_t histogram_bin_seconds = 5;
    ReplaySummary summary;
    std::vector<EngineEvent> events;
    std::map<std::string, std::string> display_aliases;
};

/**
 * Feeds the records through a fresh engine in order. Idle ticks are inserted
 * for long inter-arrival gaps and, once the corpus is exhausted, until the
 * queue drains; revision prompts are answered with the configured policy.
 */
ReplayReport run_replay(const std::vector<CorpusRecord>& records,
                        const ReplayConfig& config,
                        std::shared_ptr<const Lexicon> lexicon);

/// Replays a raw engine input stream with no harness policies.
std::vector<EngineEvent> run_inputs(std::span<const EngineInput> inputs,
                                    const EngineConfig& config,
                                    std::shared_ptr<const Lexicon> lexicon);

/// Builds the report data (outcomes, trajectory, summary) from an event log.
ReplayReport report_from_events(std::span<const EngineEvent> events,
                                const EmotionSet& emotions,
                                std::int64_t histogram_bin_seconds,
                                bool queue_enabled);

struct EmotionDelta {
    double mean_share = 0.0;
    std::array<double, 3> zone_occupancy{};
};

struct Comparison {
    EmotionSet emotions = EmotionSet::nrc_default();
    std::vector<EmotionDelta> deltas;// with_queue minus without_queue
    double held_fraction = 0.0;
    double mean_hold_seconds = 0.0;
    std::int64_t max_hold_seconds = 0;
    std::vector<HistogramBin> histogram;
    ReplaySummary with_queue;
    ReplaySummary without_queue;
};

/// Throws mismatch unless both reports cover the same comment ids.
Comparison compare_runs(const ReplayReport& with_queue, const ReplayReport& without_queue);

/// summary.json, outcomes.csv, trajectory.csv, hold_histogram.csv and events.jsonl.
void emit_report(const ReplayReport& report, const std::filesystem::path& out_dir);
/// comparison.json plus both reports under with_queue/ and without_queue/.
void emit_comparison(const Comparison& comparison,
                     const ReplayReport& with_queue,
                     const ReplayReport& without_queue,
                     const std::filesystem::path& out_dir);

}// namespace emoq::replay

#endif// EMOQ_REPLAY_HPP_
