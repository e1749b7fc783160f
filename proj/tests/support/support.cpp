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

#include "support.hpp"

#include <emoq/error.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#ifndef EMOQ_TEST_DATA_DIR
#error "EMOQ_TEST_DATA_DIR must be defined"
#endif
#ifndef EMOQ_TEST_FIXTURE_DIR
#error "EMOQ_TEST_FIXTURE_DIR must be defined"
#endif

namespace emoq::testing {

std::filesystem::path data_dir() { return EMOQ_TEST_DATA_DIR; }
std::filesystem::path fixture_dir() { return EMOQ_TEST_FIXTURE_DIR; }

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("emoq-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

EngineSettings default_settings() { return load_engine_settings(data_dir() / "config" / "default.json", {"replay"}); }

std::shared_ptr<const Lexicon> default_lexicon() {
    static const auto lexicon = [] {
        const auto settings = default_settings();
        return std::make_shared<const Lexicon>(
            load_lexicon(settings.lexicon_path, settings.emoji_path, settings.engine.emotions));
    }();
    return lexicon;
}

std::shared_ptr<const Lexicon> toy_lexicon() {
    auto lexicon = std::make_shared<Lexicon>(EmotionSet::nrc_default());
    lexicon->add_word("furious", "anger");
    lexicon->add_word("hate", "anger");
    lexicon->add_word("happy", "joy");
    lexicon->add_word("glad", "joy");
    lexicon->add_word("scared", "fear");
    return lexicon;
}

EmotionVector vec(std::initializer_list<std::pair<const char*, double>> values, const EmotionSet& emotions) {
    auto out = EmotionVector::zeros(emotions.size());
    for (const auto& [label, v] : values) {
        const auto idx = emotions.index_of(label);
        if (!idx) {
            throw Error(ErrorCode::config_error, std::string("unknown label ") + label);
        }
        out[*idx] = v;
    }
    return out;
}

Comment make_comment(std::string id, std::optional<std::string> parent, std::int64_t created_at, EmotionVector emotion) {
    Comment c;
    c.author = "u-" + id;
    c.body = "body of " + id;
    c.id = std::move(id);
    c.parent_id = std::move(parent);
    c.created_at = created_at;
    c.emotion = std::move(emotion);
    return c;
}

std::vector<double> dense_pagerank(const std::vector<std::int64_t>& parent_links, double damping) {
    const std::size_t n = parent_links.size();
    // g[to][from]: probability of stepping from `from` to `to`.
    std::vector<std::vector<double>> g(n, std::vector<double>(n, (1.0 - damping) / static_cast<double>(n)));
    for (std::size_t from = 0; from < n; ++from) {
        if (parent_links[from] < 0) {
            for (std::size_t to = 0; to < n; ++to) {
                g[to][from] += damping / static_cast<double>(n);
            }
        } else {
            g[static_cast<std::size_t>(parent_links[from])][from] += damping;
        }
    }
    std::vector<double> r(n, 1.0 / static_cast<double>(n));
    for (int iter = 0; iter < 100'000; ++iter) {
        std::vector<double> next(n, 0.0);
        for (std::size_t to = 0; to < n; ++to) {
            for (std::size_t from = 0; from < n; ++from) {
                next[to] += g[to][from] * r[from];
            }
        }
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            change += std::abs(next[i] - r[i]);
        }
        r = std::move(next);
        if (change < 1e-14) {
            break;
        }
    }
    return r;
}

EmotionBoard oracle_board(const ConversationGraph& source,
                          const InfluenceWeights& weights,
                          std::size_t window_size,
                          const Comment* projection) {
    ConversationGraph graph = source;
    if (projection && projection->parent_id && graph.find(*projection->parent_id)) {
        if (const auto existing = graph.find(projection->id)) {
            graph.replace_content(*existing, projection->body, projection->emotion);
            graph.publish(*existing);
        } else {
            graph.publish(graph.add_comment(*projection));
        }
    }
    const std::size_t emotions = graph.empty() ? 0 : graph.node(0).emotion.size();
    EmotionBoard board = EmotionBoard::zeros(emotions, window_size);
    const auto order = graph.publish_order();
    if (order.empty()) {
        return board;
    }

    std::map<NodeIndex, std::size_t> slot;
    for (std::size_t k = 0; k < order.size(); ++k) {
        slot[order[k]] = k;
    }
    std::vector<std::int64_t> links;
    for (const NodeIndex i : order) {
        const auto p = graph.parent(i);
        links.push_back(p && slot.contains(*p) ? static_cast<std::int64_t>(slot[*p]) : -1);
    }
    const auto rank = pagerank_links(links, weights.damping, weights.tolerance);

    std::vector<NodeIndex> members;
    for (const NodeIndex i : order) {
        if (graph.parent(i)) {
            members.push_back(i);
        }
    }
    if (members.size() > window_size) {
        members.erase(members.begin(), members.end() - static_cast<std::ptrdiff_t>(window_size));
    }
    board.basis_count = members.size();

    auto replies = [&](NodeIndex i) {
        std::size_t n = 0;
        for (const NodeIndex c : graph.children(i)) {
            n += graph.is_published(c) ? 1 : 0;
        }
        return static_cast<double>(n);
    };
    double max_replies = 0.0;
    double max_rank = 0.0;
    for (const NodeIndex i : members) {
        max_replies = std::max(max_replies, replies(i));
        max_rank = std::max(max_rank, rank[slot[i]]);
    }
    std::vector<double> totals(emotions, 0.0);
    for (const NodeIndex i : members) {
        double influence = weights.depth / (1.0 + graph.depth(i));
        if (max_replies > 0.0) {
            influence += weights.replies * replies(i) / max_replies;
        }
        if (max_rank > 0.0) {
            influence += weights.pagerank * rank[slot[i]] / max_rank;
        }
        for (std::size_t e = 0; e < emotions; ++e) {
            totals[e] += influence * graph.node(i).emotion[e];
        }
    }
    double sum = 0.0;
    for (const double t : totals) {
        sum += t;
    }
    if (sum > 0.0) {
        for (std::size_t e = 0; e < emotions; ++e) {
            board.shares[e] = 100.0 * totals[e] / sum;
        }
    }
    return board;
}

std::uint64_t Fuzzer::below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_); }

double Fuzzer::unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }

EmotionVector Fuzzer::emotion(const EmotionSet& emotions, double zero_p) {
    auto out = EmotionVector::zeros(emotions.size());
    if (chance(zero_p)) {
        return out;
    }
    const std::size_t hits = 1 + below(3);
    for (std::size_t h = 0; h < hits; ++h) {
        out[below(emotions.size())] = 0.1 + 0.9 * unit();
    }
    return out;
}

EmotionVector Fuzzer::hot(const EmotionSet& emotions) {
    auto out = EmotionVector::zeros(emotions.size());
    out[0] = 0.6 + 0.4 * unit();
    if (chance(0.3)) {
        out[1 + below(emotions.size() - 1)] = 0.1 + 0.2 * unit();
    }
    return out;
}

std::vector<std::int64_t> Fuzzer::random_tree(std::size_t n) {
    std::vector<std::int64_t> links(n, -1);
    for (std::size_t i = 1; i < n; ++i) {
        // Mostly one tree; an occasional extra root makes a forest.
        links[i] = chance(0.05) ? -1 : static_cast<std::int64_t>(below(i));
    }
    return links;
}

namespace {

void answer_prompts(Fuzzer& fuzz, Engine& engine, std::vector<EngineInput>& inputs, std::int64_t now) {
    for (;;) {
        std::optional<std::string> prompted;
        for (const auto& entry : engine.queue()) {
            if (entry.revision_state == RevisionState::prompted) {
                prompted = engine.graph().node(entry.node).id;
                break;
            }
        }
        if (!prompted) {
            return;
        }
        RevisionInput in;
        in.comment_id = *prompted;
        in.time = now;
        const auto roll = fuzz.below(3);
        in.response.kind = roll == 0 ? RevisionKind::revised : roll == 1 ? RevisionKind::unchanged
                                                                          : RevisionKind::withdrawn;
        if (in.response.kind == RevisionKind::revised) {
            in.response.body = "revised";
            auto emotion = engine.graph().at(*prompted).emotion;
            const double keep = fuzz.unit();
            for (double& v : emotion.values) {
                v *= keep;
            }
            in.response.emotion = emotion;
        }
        inputs.emplace_back(in);
        engine.apply(inputs.back());
    }
}

}// namespace

FuzzStream fuzz_stream(Fuzzer& fuzz, const EngineConfig& config, std::size_t comments, double hot_p) {
    FuzzStream out;
    out.engine = std::make_unique<Engine>(config);
    Engine& engine = *out.engine;
    const auto& emotions = config.emotions;
    std::int64_t now = 1'000;
    auto submit = [&](Comment c) {
        out.inputs.emplace_back(SubmitInput{std::move(c)});
        engine.apply(out.inputs.back());
    };
    submit(make_comment("c0", std::nullopt, now, fuzz.emotion(emotions, 0.5)));
    for (std::size_t i = 1; i < comments; ++i) {
        now += static_cast<std::int64_t>(1 + fuzz.below(30));
        if (fuzz.chance(0.15)) {
            out.inputs.emplace_back(IdleTickInput{now});
            engine.apply(out.inputs.back());
            answer_prompts(fuzz, engine, out.inputs, now);
            now += 1;
        }
        const std::string parent = engine.graph().node(static_cast<NodeIndex>(fuzz.below(engine.graph().size()))).id;
        submit(make_comment("c" + std::to_string(i), parent, now,
                            fuzz.chance(hot_p) ? fuzz.hot(emotions) : fuzz.emotion(emotions)));
        answer_prompts(fuzz, engine, out.inputs, now);
    }
    // Each tick re-evaluates every waiting entry, so the queue drains within
    // reeval_limit ticks once prompts are answered.
    for (std::uint32_t t = 0; !engine.queue().empty() && t <= config.reeval_limit + 1; ++t) {
        now += 60;
        out.inputs.emplace_back(IdleTickInput{now});
        engine.apply(out.inputs.back());
        answer_prompts(fuzz, engine, out.inputs, now);
    }
    return out;
}

double board_sequence_deviation(Fuzzer& fuzz, std::size_t max_comments) {
    const auto emotions = EmotionSet::nrc_default();
    InfluenceWeights weights;
    const std::size_t n = 2 + fuzz.below(max_comments - 1);
    const std::size_t window = 1 + fuzz.below(fuzz.chance(0.5) ? 10 : 150);
    ConversationGraph graph;
    BoardTracker tracker(emotions.size(), weights, window);
    double worst = 0.0;
    auto compare = [&](const EmotionBoard& got, const EmotionBoard& want) {
        if (got.shares.size() != want.shares.size() || got.basis_count != want.basis_count) {
            worst = std::max(worst, 100.0);
            return;
        }
        for (std::size_t e = 0; e < want.shares.size(); ++e) {
            worst = std::max(worst, std::abs(got.shares[e] - want.shares[e]));
        }
    };
    std::int64_t now = 0;
    const NodeIndex root = graph.add_comment(make_comment("r", std::nullopt, now, fuzz.emotion(emotions, 0.5)));
    graph.publish(root);
    tracker.on_publish(graph, root);
    for (std::size_t i = 1; i < n; ++i) {
        now += 1;
        const auto parent = graph.node(static_cast<NodeIndex>(fuzz.below(graph.size()))).id;
        const NodeIndex node = graph.add_comment(make_comment("n" + std::to_string(i), parent, now, fuzz.emotion(emotions)));
        if (fuzz.chance(0.15)) {
            continue;// left unpublished, like a held comment
        }
        graph.publish(node);
        tracker.on_publish(graph, node);
        compare(tracker.current(), oracle_board(graph, weights, window));
        if (fuzz.chance(0.1)) {
            const auto cand_parent = graph.node(static_cast<NodeIndex>(fuzz.below(graph.size()))).id;
            const auto cand = make_comment("cand" + std::to_string(i), cand_parent, now, fuzz.emotion(emotions));
            compare(tracker.project(graph, cand), oracle_board(graph, weights, window, &cand));
        }
        // Projecting a comment that was held back, possibly with published replies.
        if (fuzz.chance(0.2)) {
            for (NodeIndex j = 1; j < graph.size(); ++j) {
                if (!graph.is_published(j)) {
                    const Comment& held = graph.node(j);
                    compare(tracker.project(graph, held), oracle_board(graph, weights, window, &held));
                    break;
                }
            }
        }
    }
    return worst;
}

SafetyTally check_publication_safety(const Engine& engine) {
    SafetyTally tally;
    const auto events = engine.events();
    const auto& graph = engine.graph();
    for (std::size_t k = 1; k < events.size(); ++k) {
        const auto& ev = events[k];
        const bool publication = ev.kind == EventKind::published || ev.kind == EventKind::released ||
                                 ev.kind == EventKind::revision_resolved;
        if (!publication || !graph.parent(graph.index_of(*ev.comment_id))) {
            continue;
        }
        ++tally.publications;
        const auto& before = events[k - 1];
        if (violates_limits(before.board, ev.board, before.thresholds, engine.config().min_basis)) {
            ++tally.violations;
        }
    }
    return tally;
}

LifecycleTally check_lifecycle(const Engine& engine) {
    LifecycleTally tally;
    std::map<std::string, int> endings;
    std::map<std::string, std::size_t> ticks_waiting;
    std::set<std::string> waiting;// queued and not yet prompted
    for (const auto& ev : engine.events()) {
        switch (ev.kind) {
            case EventKind::enqueued:
                ++tally.enqueued;
                endings[*ev.comment_id] = 0;
                ticks_waiting[*ev.comment_id] = 0;
                waiting.insert(*ev.comment_id);
                break;
            case EventKind::released:
            case EventKind::suspended:
            case EventKind::revision_resolved:
                ++endings[*ev.comment_id];
                waiting.erase(*ev.comment_id);
                break;
            case EventKind::revision_prompted: waiting.erase(*ev.comment_id); break;
            case EventKind::idle_tick:
                for (const auto& id : waiting) {
                    if (++ticks_waiting[id] > engine.config().reeval_limit) {
                        ++tally.slow;
                    }
                }
                break;
            default: break;
        }
    }
    for (const auto& [id, n] : endings) {
        tally.terminated += n >= 1 ? 1 : 0;
        tally.double_endings += n > 1 ? 1 : 0;
        tally.unfinished += n == 0 ? 1 : 0;
    }
    return tally;
}

MonotonicityTally check_monotonicity(Fuzzer& fuzz, std::size_t trials) {
    MonotonicityTally tally;
    std::size_t& done = tally.trials;
    while (done < trials) {
        EngineConfig cfg;
        cfg.min_basis = fuzz.below(4);
        cfg.window_size = 1 + fuzz.below(40);
        // Limits at 100% admit everything, so the frozen state holds any thread.
        cfg.thresholds.base.assign(cfg.emotions.size(), 100.0);
        cfg.thresholds.min_pct = 0.0;
        cfg.thresholds.max_pct = 100.0;
        cfg.thresholds.alpha = 0.0;
        Engine engine(cfg);
        const auto& emotions = cfg.emotions;
        const std::size_t n = 1 + fuzz.below(60);
        engine.submit(make_comment("r", std::nullopt, 0, fuzz.emotion(emotions, 0.5)));
        for (std::size_t i = 1; i < n; ++i) {
            const auto parent = engine.graph().node(static_cast<NodeIndex>(fuzz.below(engine.graph().size()))).id;
            engine.submit(make_comment("n" + std::to_string(i), parent, static_cast<std::int64_t>(i),
                                       fuzz.chance(0.3) ? fuzz.hot(emotions) : fuzz.emotion(emotions)));
        }
        for (int t = 0; t < 20 && done < trials; ++t, ++done) {
            const auto parent = engine.graph().node(static_cast<NodeIndex>(fuzz.below(engine.graph().size()))).id;
            const auto cand = make_comment("cand", parent, static_cast<std::int64_t>(n),
                                           fuzz.chance(0.5) ? fuzz.hot(emotions) : fuzz.emotion(emotions));
            std::vector<double> limits(emotions.size());
            for (double& l : limits) {
                l = 100.0 * fuzz.unit();
            }
            if (engine.evaluate(cand, limits).admit) {
                continue;
            }
            ++tally.held;
            for (int k = 0; k < 5; ++k) {
                auto lower = limits;
                for (double& l : lower) {
                    l *= fuzz.unit();
                }
                if (engine.evaluate(cand, lower).admit) {
                    ++tally.counterexamples;
                }
            }
        }
    }
    return tally;
}

}// namespace emoq::testing
