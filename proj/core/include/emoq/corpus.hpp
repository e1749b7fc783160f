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

#ifndef EMOQ_CORPUS_HPP_
#define EMOQ_CORPUS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace emoq::replay {

/// One comment of an exported thread. An empty parent_id marks the root post.
struct CorpusRecord {
    std::string id;
    std::string parent_id;
    std::string author;
    std::string body;
    std::int64_t created_utc = 0;

    friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

enum class CorpusFormat { csv, jsonl };

CorpusFormat corpus_format_from(std::string_view name);

struct Corpus {
    std::vector<CorpusRecord> records;// (created_utc, id) order, parents first
    std::size_t dropped = 0;          // orphans and replies that predate their parent
};

/**
 * Reads a thread export. CSV needs a header naming id, parent_id, author,
 * body and created_utc (RFC 4180 quoting); JSONL holds one object per line
 * with the same keys. Throws corpus_shape unless exactly one root exists and
 * parse_error with the row number on malformed rows.
 */
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
Corpus parse_corpus(std::istream& in, CorpusFormat format, std::string_view source = "<stream>");

void write_corpus_csv(std::ostream& out, const std::vector<CorpusRecord>& records);
void write_corpus_jsonl(std::ostream& out, const std::vector<CorpusRecord>& records);

/// Tone families used by calm comments, in `SynthProfile::calm_mix` order.
inline constexpr std::array<std::string_view, 6> kCalmTones = {"joy", "trust", "anticipation",
                                                               "surprise", "sadness", "neutral"};

/**
 * Seeded stand-in for a recorded thread. Exactly round(hot_fraction * size)
 * replies (capped at the reply count) come from hot templates, clustered
 * into flame-war bursts that chain off one another. Every other reply is calm,
 * answers the post directly and is free of anger words.
 */
struct SynthProfile {
    std::size_t size = 2000;
    double hot_fraction = 0.2;
    std::array<double, 6> calm_mix = {0.28, 0.24, 0.2, 0.14, 0.14, 0.0};
    std::size_t lead_in = 10;   // opening replies kept calm
    std::size_t burst_min = 30; // hot comments per burst
    std::size_t burst_max = 60;
    double burst_density = 0.7; // share of hot comments inside a burst region
    std::int64_t start_utc = 1'700'000'000;

    void validate() const;
};

std::vector<CorpusRecord> synthesize_corpus(const SynthProfile& profile, std::uint64_t seed);

}// namespace emoq::replay

#endif// EMOQ_CORPUS_HPP_
