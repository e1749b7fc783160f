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

#ifndef EMOQ_EVENT_LOG_HPP_
#define EMOQ_EVENT_LOG_HPP_

#include <emoq/engine.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emoq {

/// One JSON object, no trailing newline. Field order is fixed.
std::string to_json_line(const EngineEvent& event, const EmotionSet& emotions);
EngineEvent parse_event_line(std::string_view line, const EmotionSet& emotions);

void write_event_log(std::ostream& out, std::span<const EngineEvent> events, const EmotionSet& emotions);
std::vector<EngineEvent> read_event_log(const std::filesystem::path& path, const EmotionSet& emotions);

/**
 * Recovers the engine inputs that produced a log. Every input emits exactly
 * one leading event (published/enqueued for submissions, idle_tick, and
 * revision_resolved/suspended for revision answers), so the inputs are those
 * events in order.
 */
std::vector<EngineInput> inputs_from_events(std::span<const EngineEvent> events);

/// Canonical JSON dump of the full engine state, for equality checks and status views.
std::string engine_state_json(const Engine& engine);

}// namespace emoq

#endif// EMOQ_EVENT_LOG_HPP_
