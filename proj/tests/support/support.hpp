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

#ifndef EMOQ_TESTS_SUPPORT_HPP_
#define EMOQ_TESTS_SUPPORT_HPP_

#include <emoq/config.hpp>
#include <emoq/engine.hpp>
#include <emoq/graph.hpp>
#include <emoq/lexicon.hpp>

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace emoq::testing {

/// Repository data directory (lexicons, default config, bundled corpus).
std::filesystem::path data_dir();
/// tests/fixtures.
std::filesystem::path fixture_dir();
/// A fresh, empty directory under the system temp directory.
std::filesystem::path scratch_dir(const std::string& name);

/// Default settings with lexicon paths resolved against data_dir().
EngineSettings default_settings();
std::shared_ptr<const Lexicon> default_lexicon();

/// A handful of words: "furious"/"hate" anger, "happy"/"glad" joy, "scared" fear.
std::shared_ptr<const Lexicon> toy_lexicon();

EmotionVector vec(std::initializer_list<std::pair<const char*, double>> values,
                  const EmotionSet& emotions = EmotionSet::nrc_default());

Comment make_comment(std::string id,
                     std::optional<std::string> parent,
                     std::int64_t created_at,
                     EmotionVector emotion);

/**
 * PageRank by dense matrix power iteration, written independently of the
 * library: builds the column-stochastic Google matrix explicitly and iterates
 * to a fixed 1e-14 L1 change.
 */
std::vector<double> dense_pagerank(const std::vector<std::int64_t>& parent_links, double damping);

/**
 * Board recomputed from scratch on a copy of the graph: publish order, window
 * cut, reply counts from the child lists, influence terms and the share
 * normalisation are all spelled out here. Ranks come from pagerank_links,
 * which dense_pagerank checks separately. A projection is published into
 * the copy before the recompute.
 */
EmotionBoard oracle_board(const ConversationGraph& graph,
                          const InfluenceWeights& weights,
                          std::size_t window_size,
                          const Comment* projection = nullptr);

/// Deterministic generator for random threads and engine configurations.
class Fuzzer {
  public:
    explicit Fuzzer(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t below(std::uint64_t n);
    double unit();
    bool chance(double p) { return unit() < p; }

    /// Sparse random emotion vector; zero with probability `zero_p`.
    EmotionVector emotion(const EmotionSet& emotions, double zero_p = 0.1);
    /// A hot vector dominated by anger.
    EmotionVector hot(const EmotionSet& emotions);

    /// Random parent links for an n-node rooted forest (node 0 is the root).
    std::vector<std::int64_t> random_tree(std::size_t n);

    std::mt19937_64& engine() noexcept { return gen_; }

  private:
    std::mt19937_64 gen_;
};

/// Random engine input stream: submissions, idle ticks and revision answers.
struct FuzzStream {
    std::unique_ptr<Engine> engine;
    std::vector<EngineInput> inputs;
};

/**
 * Drives a fresh engine with random submissions and idle ticks, answering
 * revision prompts at random, then idles until the queue drains. Records
 * every input it fed.
 */
FuzzStream fuzz_stream(Fuzzer& fuzz, const EngineConfig& config, std::size_t comments, double hot_p);

/**
 * Publishes a random thread of up to `max_comments` comments through a
 * BoardTracker, leaving some comments unpublished, and compares the tracked
 * board and a projection against oracle_board after every publication.
 * Returns the largest share difference seen.
 */
double board_sequence_deviation(Fuzzer& fuzz, std::size_t max_comments);

/// Publications checked against the admission predicate at their instant.
struct SafetyTally {
    std::size_t publications = 0;
    std::size_t violations = 0;
};

/**
 * For every non-root publication, the board shown by the preceding event is
 * the current board and the publication's own board is the projection; the
 * pair must pass violates_limits with the limits in force before it.
 */
SafetyTally check_publication_safety(const Engine& engine);

struct LifecycleTally {
    std::size_t enqueued = 0;
    std::size_t terminated = 0;     // released, revision-published, suspended or withdrawn
    std::size_t double_endings = 0; // comments that ended more than once
    std::size_t unfinished = 0;     // enqueued but never ended
    std::size_t slow = 0;           // more idle ticks than reeval_limit before release or prompt
};

LifecycleTally check_lifecycle(const Engine& engine);

struct MonotonicityTally {
    std::size_t trials = 0;
    std::size_t held = 0;           // trials whose candidate is held under T
    std::size_t counterexamples = 0;// sampled T' <= T that admit a held candidate
};

/**
 * Random frozen engine states, twenty candidates each. Every candidate held
 * under random limits T is re-judged under five sampled T' <= T.
 */
MonotonicityTally check_monotonicity(Fuzzer& fuzz, std::size_t trials);

}// namespace emoq::testing

#endif// EMOQ_TESTS_SUPPORT_HPP_
