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
#include <emoq/error.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace emoq {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& key, std::string_view why) {
    throw Error(ErrorCode::config_error, "config key '" + key + "': " + std::string(why));
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) {
        bad_key(key, "expected a number");
    }
    return v.get<double>();
}

std::size_t count(const json& v, const std::string& key) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        bad_key(key, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
}

bool flag(const json& v, const std::string& key) {
    if (!v.is_boolean()) {
        bad_key(key, "expected true or false");
    }
    return v.get<bool>();
}

const json& object(const json& v, const std::string& key) {
    if (!v.is_object()) {
        bad_key(key, "expected an object");
    }
    return v;
}

std::filesystem::path path_value(const json& v, const std::string& key, const std::filesystem::path& base_dir) {
    if (!v.is_string()) {
        bad_key(key, "expected a path string");
    }
    std::filesystem::path p = v.get<std::string>();
    if (!p.empty() && p.is_relative() && !base_dir.empty()) {
        p = base_dir / p;
    }
    return p;
}

json parse_document(std::string_view text) {
    try {
        json doc = json::parse(text);
        if (!doc.is_object()) {
            throw Error(ErrorCode::config_error, "config document must be a JSON object");
        }
        return doc;
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::config_error, std::string("config is not valid JSON: ") + e.what());
    }
}

void apply_document(EngineSettings& s,
                    const json& doc,
                    const std::filesystem::path& base_dir,
                    std::initializer_list<std::string_view> foreign_sections) {
    EngineConfig& c = s.engine;
    // Emotion set first: thresholds are laid out by it.
    if (auto it = doc.find("emotion_set"); it != doc.end()) {
        if (!it->is_array()) {
            bad_key("emotion_set", "expected a list of labels");
        }
        std::vector<std::string> labels;
        for (const auto& l : *it) {
            if (!l.is_string()) {
                bad_key("emotion_set", "labels must be strings");
            }
            labels.push_back(l.get<std::string>());
        }
        EmotionSet set(std::move(labels));
        if (!(set == c.emotions)) {
            const auto old = c.thresholds;
            c.thresholds = ThresholdParams::defaults_for(set);
            c.thresholds.min_pct = old.min_pct;
            c.thresholds.max_pct = old.max_pct;
            c.thresholds.alpha = old.alpha;
            c.thresholds.idle_step = old.idle_step;
            c.thresholds.trend_enabled = old.trend_enabled;
            c.thresholds.trend_rise_pct = old.trend_rise_pct;
            c.thresholds.trend_penalty_pct = old.trend_penalty_pct;
            c.emotions = std::move(set);
        }
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "emotion_set") {
            continue;
        }
        if (std::find(foreign_sections.begin(), foreign_sections.end(), key) != foreign_sections.end()) {
            continue;
        }
        if (key == "lexicon") {
            for (const auto& [k, v] : object(value, key).items()) {
                if (k == "words") {
                    s.lexicon_path = path_value(v, "lexicon.words", base_dir);
                } else if (k == "emoji") {
                    s.emoji_path = path_value(v, "lexicon.emoji", base_dir);
                } else {
                    bad_key("lexicon." + k, "unknown key");
                }
            }
        } else if (key == "thresholds") {
            for (const auto& [k, v] : object(value, key).items()) {
                const std::string name = "thresholds." + k;
                if (k == "base") {
                    for (const auto& [label, pct] : object(v, name).items()) {
                        const auto idx = c.emotions.index_of(label);
                        if (!idx) {
                            bad_key(name + "." + label, "emotion is not in the emotion set");
                        }
                        c.thresholds.base[*idx] = number(pct, name + "." + label);
                    }
                } else if (k == "min_pct") {
                    c.thresholds.min_pct = number(v, name);
                } else if (k == "max_pct") {
                    c.thresholds.max_pct = number(v, name);
                } else {
                    bad_key(name, "unknown key");
                }
            }
        } else if (key == "alpha") {
            c.thresholds.alpha = number(value, key);
        } else if (key == "idle_step") {
            c.thresholds.idle_step = number(value, key);
        } else if (key == "activity_window") {
            c.activity_window = count(value, key);
        } else if (key == "reeval_limit") {
            c.reeval_limit = static_cast<std::uint32_t>(count(value, key));
        } else if (key == "window_size") {
            c.window_size = count(value, key);
        } else if (key == "min_basis") {
            c.min_basis = count(value, key);
        } else if (key == "moderation_enabled") {
            c.moderation_enabled = flag(value, key);
        } else if (key == "weights") {
            for (const auto& [k, v] : object(value, key).items()) {
                const std::string name = "weights." + k;
                if (k == "replies") {
                    c.weights.replies = number(v, name);
                } else if (k == "depth") {
                    c.weights.depth = number(v, name);
                } else if (k == "pagerank") {
                    c.weights.pagerank = number(v, name);
                } else {
                    bad_key(name, "unknown key");
                }
            }
        } else if (key == "pagerank") {
            for (const auto& [k, v] : object(value, key).items()) {
                const std::string name = "pagerank." + k;
                if (k == "damping") {
                    c.weights.damping = number(v, name);
                } else if (k == "tolerance") {
                    c.weights.tolerance = number(v, name);
                } else {
                    bad_key(name, "unknown key");
                }
            }
        } else if (key == "trend_adjustment") {
            for (const auto& [k, v] : object(value, key).items()) {
                const std::string name = "trend_adjustment." + k;
                if (k == "enabled") {
                    c.thresholds.trend_enabled = flag(v, name);
                } else if (k == "rise_pct") {
                    c.thresholds.trend_rise_pct = number(v, name);
                } else if (k == "penalty_pct") {
                    c.thresholds.trend_penalty_pct = number(v, name);
                } else {
                    bad_key(name, "unknown key");
                }
            }
        } else {
            bad_key(key, "unknown key");
        }
    }
    c.validate();
}

}// namespace

EngineSettings parse_engine_settings(std::string_view json_text,
                                     const std::filesystem::path& base_dir,
                                     std::initializer_list<std::string_view> foreign_sections) {
    EngineSettings s;
    apply_document(s, parse_document(json_text), base_dir, foreign_sections);
    return s;
}

EngineSettings load_engine_settings(const std::filesystem::path& file,
                                    std::initializer_list<std::string_view> foreign_sections) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::load_error, "cannot open config '" + file.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_engine_settings(text.str(), file.parent_path(), foreign_sections);
}

void apply_overrides(EngineSettings& settings, std::string_view json_text, const std::filesystem::path& base_dir) {
    EngineSettings next = settings;
    apply_document(next, parse_document(json_text), base_dir, {});
    settings = std::move(next);
}

std::string to_json(const EngineSettings& s) {
    const EngineConfig& c = s.engine;
    nlohmann::ordered_json doc;
    doc["emotion_set"] = std::vector<std::string>(c.emotions.labels().begin(), c.emotions.labels().end());
    doc["lexicon"] = {{"words", s.lexicon_path.string()}, {"emoji", s.emoji_path.string()}};
    nlohmann::ordered_json base = nlohmann::ordered_json::object();
    for (std::size_t e = 0; e < c.emotions.size(); ++e) {
        base[c.emotions.label(e)] = c.thresholds.base[e];
    }
    doc["thresholds"] = {{"base", base}, {"min_pct", c.thresholds.min_pct}, {"max_pct", c.thresholds.max_pct}};
    doc["alpha"] = c.thresholds.alpha;
    doc["idle_step"] = c.thresholds.idle_step;
    doc["activity_window"] = c.activity_window;
    doc["reeval_limit"] = c.reeval_limit;
    doc["window_size"] = c.window_size;
    doc["min_basis"] = c.min_basis;
    doc["moderation_enabled"] = c.moderation_enabled;
    doc["weights"] = {{"replies", c.weights.replies}, {"depth", c.weights.depth}, {"pagerank", c.weights.pagerank}};
    doc["pagerank"] = {{"damping", c.weights.damping}, {"tolerance", c.weights.tolerance}};
    doc["trend_adjustment"] = {{"enabled", c.thresholds.trend_enabled},
                               {"rise_pct", c.thresholds.trend_rise_pct},
                               {"penalty_pct", c.thresholds.trend_penalty_pct}};
    return doc.dump(2);
}

}// namespace emoq
