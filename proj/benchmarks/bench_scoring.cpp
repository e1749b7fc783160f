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
#include <emoq/lexicon.hpp>

#include <benchmark/benchmark.h>

#include <memory>
#include <string>

namespace {

const emoq::Lexicon& bundled_lexicon() {
    static const auto lexicon = [] {
        const auto settings = emoq::load_engine_settings(EMOQ_BENCH_DATA_DIR "/config/default.json", {"replay"});
        return emoq::load_lexicon(settings.lexicon_path, settings.emoji_path, settings.engine.emotions);
    }();
    return lexicon;
}

void BM_LoadLexicon(benchmark::State& state) {
    const auto settings = emoq::load_engine_settings(EMOQ_BENCH_DATA_DIR "/config/default.json", {"replay"});
    for (auto _ : state) {
        benchmark::DoNotOptimize(emoq::load_lexicon(settings.lexicon_path, settings.emoji_path, settings.engine.emotions));
    }
}
BENCHMARK(BM_LoadLexicon)->Unit(benchmark::kMillisecond);

void BM_ScoreText(benchmark::State& state) {
    const auto& lexicon = bundled_lexicon();
    std::string text;
    for (std::int64_t i = 0; i < state.range(0); ++i) {
        text += i % 3 == 0 ? "furious " : "the council meeting was long ";
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(emoq::score_text(text, lexicon));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ScoreText)->Arg(4)->Arg(32)->Arg(256);

}// namespace
