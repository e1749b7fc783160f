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
#include <emoq/event_log.hpp>
#include <emoq/replay.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

namespace emoq {
namespace {

std::string log_text(std::span<const EngineEvent> events, const EmotionSet& emotions) {
    std::ostringstream out;
    write_event_log(out, events, emotions);
    return out.str();
}

testing::FuzzStream sample_stream(std::uint64_t seed) {
    testing::Fuzzer fuzz(seed);
    EngineConfig cfg;
    cfg.min_basis = 2;
    return testing::fuzz_stream(fuzz, cfg, 80, 0.3);
}

TEST(EventLog, LineRoundTrip) {
    const auto stream = sample_stream(3);
    const auto& emotions = stream.engine->config().emotions;
    for (const auto& ev : stream.engine->events()) {
        const auto line = to_json_line(ev, emotions);
        EXPECT_EQ(line.find('\n'), std::string::npos);
        EXPECT_EQ(to_json_line(parse_event_line(line, emotions), emotions), line);
    }
}

TEST(EventLog, CoversEveryKind) {
    const auto stream = sample_stream(3);
    std::set<EventKind> kinds;
    for (const auto& ev : stream.engine->events()) {
        kinds.insert(ev.kind);
    }
    EXPECT_TRUE(kinds.contains(EventKind::published));
    EXPECT_TRUE(kinds.contains(EventKind::enqueued));
    EXPECT_TRUE(kinds.contains(EventKind::idle_tick));
    EXPECT_TRUE(kinds.contains(EventKind::thresholds_adjusted));
}

TEST(EventLog, FileRoundTrip) {
    const auto stream = sample_stream(5);
    const auto& emotions = stream.engine->config().emotions;
    const auto path = testing::scratch_dir("event-log") / "events.jsonl";
    {
        std::ofstream out(path, std::ios::binary);
        write_event_log(out, stream.engine->events(), emotions);
    }
    const auto back = read_event_log(path, emotions);
    EXPECT_EQ(log_text(back, emotions), log_text(stream.engine->events(), emotions));
}

TEST(EventLog, InputsReproduceLog) {
    const auto stream = sample_stream(11);
    const auto& cfg = stream.engine->config();
    const auto inputs = inputs_from_events(stream.engine->events());
    EXPECT_EQ(inputs.size(), stream.inputs.size());
    const auto rerun = replay::run_inputs(inputs, cfg, nullptr);
    EXPECT_EQ(log_text(rerun, cfg.emotions), log_text(stream.engine->events(), cfg.emotions));
}

TEST(EventLog, StateJsonIsStable) {
    const auto a = sample_stream(13);
    const auto b = sample_stream(13);
    EXPECT_EQ(engine_state_json(*a.engine), engine_state_json(*b.engine));
    const auto c = sample_stream(14);
    EXPECT_NE(engine_state_json(*a.engine), engine_state_json(*c.engine));
}

TEST(EventLog, MalformedLines) {
    const auto& emotions = EmotionSet::nrc_default();
    for (const char* line : {"{", "[]", R"({"seq":1,"kind":"exploded"})"}) {
        try {
            (void)parse_event_line(line, emotions);
            ADD_FAILURE() << line;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::parse_error) << line;
        }
    }
}

TEST(EventLog, MissingFile) {
    EXPECT_THROW((void)read_event_log("/nonexistent/events.jsonl", EmotionSet::nrc_default()), Error);
}

}// namespace
}// namespace emoq
