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

#ifndef EMOQ_CONFIG_HPP_
#define EMOQ_CONFIG_HPP_

#include <emoq/engine.hpp>

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

namespace emoq {

/// Engine parameters plus the lexicon files they are scored with.
struct EngineSettings {
    EngineConfig engine;
    std::filesystem::path lexicon_path;
    std::filesystem::path emoji_path;
};

/**
 * Parses a JSON engine document. Keys mirror the dotted configuration names,
 * e.g. `{"thresholds": {"base": {"anger": 50}}, "pagerank": {"damping": 0.85}}`.
 * Unknown keys throw Error(config_error) naming the offending key; top-level
 * sections listed in `foreign_sections` are skipped. Relative lexicon paths
 * resolve against `base_dir`.
 */
EngineSettings parse_engine_settings(std::string_view json_text,
                                     const std::filesystem::path& base_dir = {},
                                     std::initializer_list<std::string_view> foreign_sections = {});

EngineSettings load_engine_settings(const std::filesystem::path& file,
                                    std::initializer_list<std::string_view> foreign_sections = {});

/// Applies a partial document on top of existing settings with the same validation.
void apply_overrides(EngineSettings& settings, std::string_view json_text, const std::filesystem::path& base_dir = {});

/// Canonical full document; parse_engine_settings(to_json(s)) round-trips.
std::string to_json(const EngineSettings& settings);

}// namespace emoq

#endif// EMOQ_CONFIG_HPP_
