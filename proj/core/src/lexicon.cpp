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

#include <emoq/error.hpp>
#include <emoq/lexicon.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>

namespace emoq {

Lexicon::Lexicon(EmotionSet emotions) : emotions_(std::move(emotions)) {}

std::optional<EmotionMask> Lexicon::label_bit(std::string_view label) const {
    if (auto idx = emotions_.index_of(label)) {
        return EmotionMask{1} << *idx;
    }
    if (is_nrc_emotion(label)) {
        return EmotionMask{0};
    }
    throw Error(ErrorCode::rejected_label, "label '" + std::string(label) + "' is not in the emotion set");
}

void Lexicon::add_word(std::string_view word, std::string_view label) {
    if (is_polarity(label)) {
        polarity_[std::string(word)] |= label == "positive" ? kPositive : kNegative;
        return;
    }
    const EmotionMask bit = *label_bit(label);
    if (bit == 0) {
        return;
    }
    EmotionMask& mask = words_[std::string(word)];
    if ((mask & bit) == 0) {
        mask |= bit;
        ++word_pairs_;
    }
}

void Lexicon::add_emoji(std::string_view emoji, std::string_view label) {
    if (is_polarity(label)) {
        return;
    }
    const EmotionMask bit = *label_bit(label);
    if (bit != 0) {
        emoji_[std::string(emoji)] |= bit;
    }
}

EmotionMask Lexicon::lookup(std::string_view token) const noexcept {
    const std::string key(token);
    if (auto it = words_.find(key); it != words_.end()) {
        return it->second;
    }
    if (auto it = emoji_.find(key); it != emoji_.end()) {
        return it->second;
    }
    return 0;
}

std::uint8_t Lexicon::polarity(std::string_view word) const noexcept {
    auto it = polarity_.find(std::string(word));
    return it == polarity_.end() ? 0 : it->second;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) {
            break;
        }
        start = tab + 1;
    }
    return fields;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    });
    return out;
}

std::string_view trim_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

template <typename LineFn>
void for_each_line(const std::filesystem::path& path, LineFn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::load_error, "cannot open '" + path.string() + "'");
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim_cr(line);
        if (view.empty()) {
            continue;
        }
        fn(view, line_no);
    }
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line_no, std::string_view why) {
    throw Error(ErrorCode::parse_error,
                path.string() + ":" + std::to_string(line_no) + ": " + std::string(why));
}

}// namespace

Lexicon load_lexicon(const std::filesystem::path& lexicon_path,
                     const std::filesystem::path& emoji_path,
                     EmotionSet emotions) {
    Lexicon lexicon(std::move(emotions));
    for_each_line(lexicon_path, [&](std::string_view line, std::size_t line_no) {
        const auto fields = split_tabs(line);
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
            malformed(lexicon_path, line_no, "expected word<TAB>label<TAB>flag");
        }
        if (fields[2] != "0" && fields[2] != "1") {
            malformed(lexicon_path, line_no, "flag must be 0 or 1");
        }
        const std::string label = ascii_lower(fields[1]);
        try {
            if (fields[2] == "1") {
                lexicon.add_word(ascii_lower(fields[0]), label);
            } else if (!is_polarity(label) && !lexicon.emotions().contains(label) && !is_nrc_emotion(label)) {
                throw Error(ErrorCode::rejected_label, "label '" + label + "' is not in the emotion set");
            }
        } catch (const Error& e) {
            throw Error(e.code(), lexicon_path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    });
    if (emoji_path.empty()) {
        return lexicon;
    }
    for_each_line(emoji_path, [&](std::string_view line, std::size_t line_no) {
        const auto fields = split_tabs(line);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            malformed(emoji_path, line_no, "expected emoji<TAB>label");
        }
        try {
            lexicon.add_emoji(fields[0], ascii_lower(fields[1]));
        } catch (const Error& e) {
            throw Error(e.code(), emoji_path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    });
    return lexicon;
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

constexpr std::array<std::string_view, 21> kEmoticons = {
    ":)", ":-)", ":(", ":-(", ":D", ":-D", ";)", ";-)", ":'(", ">:(", ">:-(",
    ":/", ":-/", ":P", ":-P", ":O", ":-O", "<3", "</3", "xD", "XD"};

struct Decoded {
    char32_t cp;
    std::size_t len;// 0 for an invalid sequence
};

Decoded decode_utf8(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    auto cont = [&](std::size_t k) -> int {
        if (pos + k >= s.size()) {
            return -1;
        }
        const auto b = static_cast<unsigned char>(s[pos + k]);
        return (b & 0xC0U) == 0x80U ? static_cast<int>(b & 0x3FU) : -1;
    };
    if (b0 < 0x80U) {
        return {b0, 1};
    }
    if ((b0 & 0xE0U) == 0xC0U) {
        const int c1 = cont(1);
        if (c1 < 0) return {0, 0};
        return {static_cast<char32_t>(((b0 & 0x1FU) << 6U) | static_cast<unsigned>(c1)), 2};
    }
    if ((b0 & 0xF0U) == 0xE0U) {
        const int c1 = cont(1), c2 = cont(2);
        if (c1 < 0 || c2 < 0) return {0, 0};
        return {static_cast<char32_t>(((b0 & 0x0FU) << 12U) | (static_cast<unsigned>(c1) << 6U)
                                      | static_cast<unsigned>(c2)),
                3};
    }
    if ((b0 & 0xF8U) == 0xF0U) {
        const int c1 = cont(1), c2 = cont(2), c3 = cont(3);
        if (c1 < 0 || c2 < 0 || c3 < 0) return {0, 0};
        return {static_cast<char32_t>(((b0 & 0x07U) << 18U) | (static_cast<unsigned>(c1) << 12U)
                                      | (static_cast<unsigned>(c2) << 6U) | static_cast<unsigned>(c3)),
                4};
    }
    return {0, 0};
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_regional_indicator(char32_t cp) { return cp >= 0x1F1E6 && cp <= 0x1F1FF; }
bool is_skin_tone(char32_t cp) { return cp >= 0x1F3FB && cp <= 0x1F3FF; }
bool is_emoji_modifier(char32_t cp) { return cp == 0xFE0F || cp == 0xFE0E || cp == 0x20E3 || is_skin_tone(cp); }

bool is_emoji_base(char32_t cp) {
    return (cp >= 0x1F000 && cp <= 0x1FAFF && !is_skin_tone(cp)) || (cp >= 0x2600 && cp <= 0x27BF)
        || (cp >= 0x2300 && cp <= 0x23FF) || (cp >= 0x2B00 && cp <= 0x2BFF) || cp == 0x3030 || cp == 0x303D;
}

bool is_latin_letter(char32_t cp) {
    return (cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7);
}

char32_t latin_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    return cp;
}

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool looks_like_url(std::string_view chunk) {
    const std::string lower = ascii_lower(chunk.substr(0, 8));
    return lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
        || chunk.find("://") != std::string_view::npos;
}

void tokenize_chunk(std::string_view chunk, std::vector<std::string>& out) {
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            out.push_back(std::move(word));
            word.clear();
        }
    };
    std::size_t pos = 0;
    while (pos < chunk.size()) {
        const Decoded d = decode_utf8(chunk, pos);
        if (d.len == 0) {
            flush();
            ++pos;
            continue;
        }
        const char32_t cp = d.cp;
        if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || is_latin_letter(cp)) {
            append_utf8(word, latin_lower(cp));
            pos += d.len;
            continue;
        }
        if ((cp == '\'' || cp == 0x2019) && !word.empty() && pos + d.len < chunk.size()) {
            const Decoded next = decode_utf8(chunk, pos + d.len);
            const char32_t n = next.cp;
            if (next.len != 0 && ((n >= 'a' && n <= 'z') || (n >= 'A' && n <= 'Z') || is_latin_letter(n))) {
                pos += d.len;// "don't" -> "dont"
                continue;
            }
        }
        if (is_emoji_base(cp) || is_regional_indicator(cp)) {
            flush();
            std::string emoji;
            append_utf8(emoji, cp);
            pos += d.len;
            bool pair_open = is_regional_indicator(cp);
            while (pos < chunk.size()) {
                const Decoded m = decode_utf8(chunk, pos);
                if (m.len == 0) break;
                if (is_emoji_modifier(m.cp)) {
                    append_utf8(emoji, m.cp);
                    pos += m.len;
                } else if (m.cp == 0x200D) {
                    append_utf8(emoji, m.cp);
                    pos += m.len;
                    if (pos < chunk.size()) {
                        const Decoded j = decode_utf8(chunk, pos);
                        if (j.len == 0) break;
                        append_utf8(emoji, j.cp);
                        pos += j.len;
                    }
                } else if (pair_open && is_regional_indicator(m.cp)) {
                    append_utf8(emoji, m.cp);
                    pos += m.len;
                    pair_open = false;
                } else {
                    break;
                }
            }
            out.push_back(std::move(emoji));
            continue;
        }
        flush();
        pos += d.len;
    }
    flush();
}

}// namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && is_space(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < text.size() && !is_space(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        if (pos == start) {
            break;
        }
        const std::string_view chunk = text.substr(start, pos - start);
        if (looks_like_url(chunk)) {
            continue;
        }
        if (std::find(kEmoticons.begin(), kEmoticons.end(), chunk) != kEmoticons.end()) {
            tokens.emplace_back(chunk);
            continue;
        }
        tokenize_chunk(chunk, tokens);
    }
    return tokens;
}

EmotionVector score_tokens(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
    const std::size_t n = lexicon.emotions().size();
    EmotionVector v = EmotionVector::zeros(n);
    if (tokens.empty()) {
        return v;
    }
    std::vector<std::size_t> hits(n, 0);
    for (const auto& token : tokens) {
        const EmotionMask mask = lexicon.lookup(token);
        for (std::size_t e = 0; e < n; ++e) {
            if ((mask >> e) & 1U) {
                ++hits[e];
            }
        }
    }
    const auto total = static_cast<double>(tokens.size());
    for (std::size_t e = 0; e < n; ++e) {
        if (hits[e] == 0) {
            continue;
        }
        v[e] = std::clamp(static_cast<double>(hits[e]) / total, 0.1, 1.0);
    }
    return v;
}

EmotionVector score_text(std::string_view text, const Lexicon& lexicon) {
    return score_tokens(tokenize(text), lexicon);
}

}// namespace emoq
