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

#include <emoq/graph.hpp>

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

namespace {

std::vector<std::int64_t> random_links(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<std::int64_t> links(n, -1);
    for (std::size_t i = 1; i < n; ++i) {
        links[i] = static_cast<std::int64_t>(gen() % i);
    }
    return links;
}

emoq::EmotionVector random_emotion(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 0.3);
    auto v = emoq::EmotionVector::zeros(emoq::EmotionSet::nrc_default().size());
    v[gen() % v.size()] = u(gen);
    v[gen() % v.size()] += u(gen);
    return v;
}

void BM_PageRank(benchmark::State& state) {
    const auto links = random_links(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(emoq::pagerank_links(links, 0.85, 1e-8));
    }
}
BENCHMARK(BM_PageRank)->Arg(50)->Arg(500)->Arg(5000);

/// Thread of `range(0)` published comments; measures one candidate projection.
void BM_BoardProjection(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto window = static_cast<std::size_t>(state.range(1));
    std::mt19937_64 gen(5);
    const auto links = random_links(n, 5);
    emoq::ConversationGraph graph;
    emoq::BoardTracker tracker(emoq::EmotionSet::nrc_default().size(), {}, window);
    for (std::size_t i = 0; i < n; ++i) {
        emoq::Comment c;
        c.id = "c" + std::to_string(i);
        if (links[i] >= 0) {
            c.parent_id = "c" + std::to_string(links[i]);
        }
        c.created_at = static_cast<std::int64_t>(i);
        c.emotion = random_emotion(gen);
        const auto node = graph.add_comment(std::move(c));
        graph.publish(node);
        tracker.on_publish(graph, node);
    }
    emoq::Comment candidate;
    candidate.id = "candidate";
    candidate.parent_id = "c" + std::to_string(n / 2);
    candidate.created_at = static_cast<std::int64_t>(n);
    candidate.emotion = random_emotion(gen);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tracker.project(graph, candidate));
    }
}
BENCHMARK(BM_BoardProjection)->Args({100, 100})->Args({1000, 100})->Args({5000, 100})->Args({1000, 1000});

}// namespace
