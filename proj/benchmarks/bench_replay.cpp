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

#include <emoq/config.hpp>
#include <emoq/corpus.hpp>
#include <emoq/lexicon.hpp>
#include <emoq/replay.hpp>

#include <benchmark/benchmark.h>

#include <memory>

namespace {

/// Full harness replay of a synthetic thread of `range(0)` comments, queue on or off.
void BM_Replay(benchmark::State& state) {
    auto cfg = emoq::replay::load_replay_config(EMOQ_BENCH_DATA_DIR "/config/default.json");
    cfg.queue_enabled = state.range(1) != 0;
    const auto lexicon = std::make_shared<const emoq::Lexicon>(
        emoq::load_lexicon(cfg.engine.lexicon_path, cfg.engine.emoji_path, cfg.engine.engine.emotions));
    emoq::replay::SynthProfile profile;
    profile.size = static_cast<std::size_t>(state.range(0));
    const auto records = emoq::replay::synthesize_corpus(profile, cfg.rng_seed);
    for (auto _ : state) {
        benchmark::DoNotOptimize(emoq::replay::run_replay(records, cfg, lexicon));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Replay)->Args({500, 1})->Args({2000, 1})->Args({2000, 0})->Unit(benchmark::kMillisecond);

}// namespace

BENCHMARK_MAIN();
