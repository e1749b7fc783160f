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

#include <emoq/emotion.hpp>
#include <emoq/error.hpp>

#include <algorithm>
#include <array>
#include <unordered_set>

namespace emoq {

namespace {
constexpr std::array<std::string_view, 8> kNrcEmotions = {
    "anger", "fear", "anticipation", "trust", "surprise", "sadness", "joy", "disgust"};
constexpr std::array<std::string_view, 2> kNrcPolarities = {"positive", "negative"};
}// namespace

std::span<const std::string_view> nrc_emotions() noexcept { return kNrcEmotions; }
std::span<const std::string_view> nrc_polarities() noexcept { return kNrcPolarities; }

bool is_polarity(std::string_view label) noexcept {
    return std::find(kNrcPolarities.begin(), kNrcPolarities.end(), label) != kNrcPolarities.end();
}

bool is_nrc_emotion(std::string_view label) noexcept {
    return std::find(kNrcEmotions.begin(), kNrcEmotions.end(), label) != kNrcEmotions.end();
}

EmotionSet::EmotionSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) {
        throw Error(ErrorCode::config_error, "emotion set must not be empty");
    }
    if (labels_.size() > kMaxEmotions) {
        throw Error(ErrorCode::config_error, "emotion set holds more than 32 labels");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& label : labels_) {
        if (label.empty()) {
            throw Error(ErrorCode::config_error, "emotion set contains an empty label");
        }
        if (is_polarity(label)) {
            throw Error(ErrorCode::config_error, "polarity '" + label + "' cannot be an emotion");
        }
        if (!seen.insert(label).second) {
            throw Error(ErrorCode::config_error, "duplicate emotion label '" + label + "'");
        }
    }
}

EmotionSet EmotionSet::nrc_default() {
    return EmotionSet(std::vector<std::string>(kNrcEmotions.begin(), kNrcEmotions.end()));
}

std::optional<EmotionIndex> EmotionSet::index_of(std::string_view label) const noexcept {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label) {
            return i;
        }
    }
    return std::nullopt;
}

bool EmotionVector::is_zero() const noexcept {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

EmotionZone zone_of(double share_pct) noexcept {
    if (share_pct < 30.0) {
        return EmotionZone::low;
    }
    if (share_pct < 60.0) {
        return EmotionZone::medium;
    }
    return EmotionZone::high;
}

std::string_view to_string(EmotionZone zone) noexcept {
    switch (zone) {
        case EmotionZone::low: return "low";
        case EmotionZone::medium: return "medium";
        case EmotionZone::high: return "high";
    }
    return "low";
}

}// namespace emoq
