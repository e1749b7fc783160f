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

#ifndef EMOQ_LEXICON_HPP_
#define EMOQ_LEXICON_HPP_

#include <emoq/emotion.hpp>

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emoq {

/// Polarity flags kept alongside the emotion entries.
enum PolarityFlag : std::uint8_t { kPositive = 1U << 0U, kNegative = 1U << 1U };

/**
 * Word and emoji associations over an EmotionSet. Immutable once built, so a
 * single instance can be shared by any number of engines and threads.
 */
class Lexicon {
  public:
    explicit Lexicon(EmotionSet emotions);

    /// Adds a word association. Labels that are NRC emotions outside the
    /// active set are skipped; unknown labels throw Error(rejected_label).
    void add_word(std::string_view word, std::string_view label);
    void add_emoji(std::string_view emoji, std::string_view label);

    const EmotionSet& emotions() const noexcept { return emotions_; }

    /// Emotion mask for a token (word or emoji), 0 when absent.
    EmotionMask lookup(std::string_view token) const noexcept;
    std::uint8_t polarity(std::string_view word) const noexcept;

    /// Number of distinct (word, emotion) pairs.
    std::size_t entry_count() const noexcept { return word_pairs_; }
    std::size_t word_count() const noexcept { return words_.size(); }
    std::size_t emoji_count() const noexcept { return emoji_.size(); }
    bool empty() const noexcept { return words_.empty() && emoji_.empty(); }

  private:
    std::optional<EmotionMask> label_bit(std::string_view label) const;

    EmotionSet emotions_;
    std::unordered_map<std::string, EmotionMask> words_;
    std::unordered_map<std::string, EmotionMask> emoji_;
    std::unordered_map<std::string, std::uint8_t> polarity_;
    std::size_t word_pairs_ = 0;
};

/**
 * Loads an NRC flat-format lexicon (`word<TAB>label<TAB>0|1`) and an emoji
 * table (`emoji<TAB>label`). An empty emoji path skips the emoji table.
 */
Lexicon load_lexicon(const std::filesystem::path& lexicon_path,
                     const std::filesystem::path& emoji_path,
                     EmotionSet emotions);

/// Lowercased word tokens; URLs and punctuation dropped; emoji and ASCII emoticons kept.
std::vector<std::string> tokenize(std::string_view text);

/// Hit-rate intensity per emotion, floored at 0.1 for any nonzero hit rate.
EmotionVector score_tokens(const std::vector<std::string>& tokens, const Lexicon& lexicon);
EmotionVector score_text(std::string_view text, const Lexicon& lexicon);

}// namespace emoq

#endif// EMOQ_LEXICON_HPP_
