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

#ifndef EMOQ_EMOTION_HPP_
#define EMOQ_EMOTION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emoq {

/// Index of an emotion inside an EmotionSet.
using EmotionIndex = std::size_t;

/// Bitmask over the positions of an EmotionSet.
using EmotionMask = std::uint32_t;

inline constexpr std::size_t kMaxEmotions = 32;

/// The eight NRC emotions in their canonical order.
std::span<const std::string_view> nrc_emotions() noexcept;

/// The two NRC sentiment polarities; parsed but never part of a board.
std::span<const std::string_view> nrc_polarities() noexcept;

bool is_polarity(std::string_view label) noexcept;
bool is_nrc_emotion(std::string_view label) noexcept;

/**
 * Ordered, duplicate-free list of emotion labels in force for one engine.
 * Every per-emotion vector in the library is laid out in this order.
 */
class EmotionSet {
  public:
    /// Throws Error(config_error) on empty, duplicated or oversized label lists.
    explicit EmotionSet(std::vector<std::string> labels);

    /// anger, fear, anticipation, trust, surprise, sadness, joy, disgust.
    static EmotionSet nrc_default();

    std::size_t size() const noexcept { return labels_.size(); }
    const std::string& label(EmotionIndex i) const { return labels_.at(i); }
    std::span<const std::string> labels() const noexcept { return labels_; }
    std::optional<EmotionIndex> index_of(std::string_view label) const noexcept;
    bool contains(std::string_view label) const noexcept { return index_of(label).has_value(); }

    friend bool operator==(const EmotionSet&, const EmotionSet&) = default;

  private:
    std::vector<std::string> labels_;
};

/// Per-emotion intensities in [0,1], laid out in EmotionSet order.
struct EmotionVector {
    std::vector<double> values;

    static EmotionVector zeros(std::size_t n) { return EmotionVector{std::vector<double>(n, 0.0)}; }

    std::size_t size() const noexcept { return values.size(); }
    double operator[](EmotionIndex i) const { return values[i]; }
    double& operator[](EmotionIndex i) { return values[i]; }
    bool is_zero() const noexcept;

    friend bool operator==(const EmotionVector&, const EmotionVector&) = default;
};

/// Display band of a percentage share: low [0,30), medium [30,60), high [60,100].
enum class EmotionZone { low, medium, high };

EmotionZone zone_of(double share_pct) noexcept;
std::string_view to_string(EmotionZone zone) noexcept;

}// namespace emoq

#endif// EMOQ_EMOTION_HPP_
