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

#include <emoq/corpus.hpp>
#include <emoq/error.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <unordered_map>

namespace emoq::replay {

namespace {

[[noreturn]] void row_error(std::string_view source, std::size_t row, std::string_view why) {
    throw Error(ErrorCode::parse_error, fmt::format("{}:{}: {}", source, row, why));
}

std::optional<std::int64_t> parse_int(std::string_view text) {
    std::int64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        return std::nullopt;
    }
    return value;
}

/// Reads one RFC 4180 record. Returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line, std::string_view source) {
    fields.clear();
    int c = in.get();
    if (c == EOF) {
        return false;
    }
    ++line;
    const std::size_t start_line = line;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (;; c = in.get()) {
        if (quoted) {
            if (c == EOF) {
                row_error(source, start_line, "unterminated quoted field");
            }
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(static_cast<char>(c));
            }
            continue;
        }
        if (c == EOF || c == '\n') {
            if (!field.empty() && field.back() == '\r') {
                field.pop_back();
            }
            fields.push_back(std::move(field));
            return true;
        }
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            field_started = false;
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
            continue;
        }
        if (c == '"') {
            row_error(source, start_line, "stray quote inside an unquoted field");
        }
        field_started = true;
        field.push_back(static_cast<char>(c));
    }
}

constexpr std::array<std::string_view, 5> kColumns = {"id", "parent_id", "author", "body", "created_utc"};

std::vector<std::pair<CorpusRecord, std::size_t>> parse_csv(std::istream& in, std::string_view source) {
    std::vector<std::pair<CorpusRecord, std::size_t>> rows;
    std::vector<std::string> fields;
    std::size_t line = 0;
    if (!read_csv_record(in, fields, line, source)) {
        row_error(source, 1, "missing header");
    }
    std::array<std::size_t, kColumns.size()> column{};
    for (std::size_t k = 0; k < kColumns.size(); ++k) {
        const auto it = std::find(fields.begin(), fields.end(), kColumns[k]);
        if (it == fields.end()) {
            row_error(source, 1, fmt::format("header lacks column '{}'", kColumns[k]));
        }
        column[k] = static_cast<std::size_t>(it - fields.begin());
    }
    const std::size_t width = fields.size();
    for (std::size_t row = line + 1; read_csv_record(in, fields, line, source); row = line + 1) {
        if (fields.size() == 1 && fields[0].empty()) {
            continue;
        }
        if (fields.size() != width) {
            row_error(source, row, fmt::format("expected {} fields, found {}", width, fields.size()));
        }
        CorpusRecord r;
        r.id = fields[column[0]];
        r.parent_id = fields[column[1]];
        r.author = fields[column[2]];
        r.body = fields[column[3]];
        const auto ts = parse_int(fields[column[4]]);
        if (!ts) {
            row_error(source, row, fmt::format("created_utc '{}' is not an integer", fields[column[4]]));
        }
        r.created_utc = *ts;
        if (r.id.empty()) {
            row_error(source, row, "empty id");
        }
        rows.emplace_back(std::move(r), row);
    }
    return rows;
}

std::string json_string(const nlohmann::json& obj, std::string_view key, std::string_view source, std::size_t row) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return {};
    }
    if (!it->is_string()) {
        row_error(source, row, fmt::format("'{}' must be a string", key));
    }
    return it->get<std::string>();
}

std::vector<std::pair<CorpusRecord, std::size_t>> parse_jsonl(std::istream& in, std::string_view source) {
    std::vector<std::pair<CorpusRecord, std::size_t>> rows;
    std::string text;
    std::size_t row = 0;
    while (std::getline(in, text)) {
        ++row;
        if (!text.empty() && text.back() == '\r') {
            text.pop_back();
        }
        if (text.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const auto obj = nlohmann::json::parse(text, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            row_error(source, row, "not a JSON object");
        }
        CorpusRecord r;
        r.id = json_string(obj, "id", source, row);
        r.parent_id = json_string(obj, "parent_id", source, row);
        r.author = json_string(obj, "author", source, row);
        r.body = json_string(obj, "body", source, row);
        const auto ts = obj.find("created_utc");
        if (ts == obj.end() || !ts->is_number_integer()) {
            row_error(source, row, "'created_utc' must be an integer");
        }
        r.created_utc = ts->get<std::int64_t>();
        if (r.id.empty()) {
            row_error(source, row, "empty id");
        }
        rows.emplace_back(std::move(r), row);
    }
    return rows;
}

/**
 * Orders parsed rows by (created_utc, id) with every parent ahead of its
 * replies. A reply sharing its parent's timestamp but sorting before it waits
 * until the parent is placed.
 */
Corpus order_records(std::vector<std::pair<CorpusRecord, std::size_t>> rows, std::string_view source) {
    std::unordered_map<std::string, std::size_t> by_id;
    std::size_t roots = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!by_id.emplace(rows[i].first.id, i).second) {
            throw Error(ErrorCode::duplicate_id,
                        fmt::format("{}:{}: duplicate id '{}'", source, rows[i].second, rows[i].first.id));
        }
        roots += rows[i].first.parent_id.empty() ? 1 : 0;
    }
    if (roots != 1) {
        throw Error(ErrorCode::corpus_shape, fmt::format("{}: expected exactly one root, found {}", source, roots));
    }

    // 0 unknown, 1 visiting, 2 kept, 3 dropped
    std::vector<int> status(rows.size(), 0);
    const auto keep = [&](auto&& self, std::size_t i) -> bool {
        if (status[i] >= 2) {
            return status[i] == 2;
        }
        if (status[i] == 1) {
            return false;
        }
        status[i] = 1;
        const CorpusRecord& r = rows[i].first;
        bool ok = true;
        if (!r.parent_id.empty()) {
            const auto it = by_id.find(r.parent_id);
            ok = it != by_id.end() && rows[it->second].first.created_utc <= r.created_utc && self(self, it->second);
        }
        status[i] = ok ? 2 : 3;
        return ok;
    };

    std::vector<std::size_t> order;
    order.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (keep(keep, i)) {
            order.push_back(i);
        }
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = rows[a].first;
        const auto& rb = rows[b].first;
        return ra.created_utc != rb.created_utc ? ra.created_utc < rb.created_utc : ra.id < rb.id;
    });

    Corpus out;
    out.dropped = rows.size() - order.size();
    out.records.reserve(order.size());
    std::unordered_map<std::string, bool> placed;
    std::map<std::string, std::vector<std::size_t>> waiting;
    const auto place = [&](auto&& self, std::size_t i) -> void {
        out.records.push_back(rows[i].first);
        const std::string& id = out.records.back().id;
        placed[id] = true;
        const auto it = waiting.find(id);
        if (it == waiting.end()) {
            return;
        }
        const auto children = std::move(it->second);
        waiting.erase(it);
        for (const auto child : children) {
            self(self, child);
        }
    };
    for (const auto i : order) {
        const CorpusRecord& r = rows[i].first;
        if (r.parent_id.empty() || placed.count(r.parent_id) != 0) {
            place(place, i);
        } else {
            waiting[r.parent_id].push_back(i);
        }
    }
    return out;
}

void write_csv_field(std::ostream& out, std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        out << field;
        return;
    }
    out << '"';
    for (const char c : field) {
        if (c == '"') {
            out << '"';
        }
        out << c;
    }
    out << '"';
}

}// namespace

CorpusFormat corpus_format_from(std::string_view name) {
    if (name == "csv") {
        return CorpusFormat::csv;
    }
    if (name == "jsonl") {
        return CorpusFormat::jsonl;
    }
    throw Error(ErrorCode::config_error, fmt::format("unknown corpus format '{}'", name));
}

Corpus parse_corpus(std::istream& in, CorpusFormat format, std::string_view source) {
    auto rows = format == CorpusFormat::csv ? parse_csv(in, source) : parse_jsonl(in, source);
    return order_records(std::move(rows), source);
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::load_error, fmt::format("cannot open corpus '{}'", path.string()));
    }
    return parse_corpus(in, format, path.string());
}

void write_corpus_csv(std::ostream& out, const std::vector<CorpusRecord>& records) {
    out << "id,parent_id,author,body,created_utc\n";
    for (const auto& r : records) {
        write_csv_field(out, r.id);
        out << ',';
        write_csv_field(out, r.parent_id);
        out << ',';
        write_csv_field(out, r.author);
        out << ',';
        write_csv_field(out, r.body);
        out << ',' << r.created_utc << '\n';
    }
}

void write_corpus_jsonl(std::ostream& out, const std::vector<CorpusRecord>& records) {
    for (const auto& r : records) {
        nlohmann::ordered_json obj;
        obj["id"] = r.id;
        obj["parent_id"] = r.parent_id;
        obj["author"] = r.author;
        obj["body"] = r.body;
        obj["created_utc"] = r.created_utc;
        out << obj.dump() << '\n';
    }
}

// Synthetic threads --------------------------------------------------------

namespace {

using Pool = std::vector<std::string_view>;

// Word pools match the bundled lexicon. Calm pools never carry an anger
// association and the filler words carry no association at all.
const Pool kTopics = {"park",   "library", "bridge", "depot",  "budget", "school", "market",
                      "clinic", "stadium", "museum", "harbor", "trail",  "bakery", "garden"};
const Pool kFiller = {"honestly", "really", "probably", "basically", "anyway", "perhaps", "still", "also"};

const std::map<std::string_view, Pool> kToneWords = {
    {"joy", {"wonderful", "delighted", "glad", "lovely", "cheerful", "fantastic", "enjoy"}},
    {"trust", {"reliable", "honest", "helpful", "fair", "sensible", "appreciate", "thanks", "agree"}},
    {"anticipation", {"hope", "eager", "ready", "upcoming", "await", "forward", "soon"}},
    {"surprise", {"unexpected", "whoa", "suddenly", "surprising"}},
    {"sadness", {"sad", "lonely", "heartbreaking", "gloomy", "regret", "tears", "unfortunate"}},
};

const Pool kAngerWords = {"furious", "outrageous", "infuriating", "livid", "rage",   "hate",
                          "ridiculous", "enraged", "clown",     "yelling", "insulting", "angry",
                          "bitter",   "idiot",   "insult",      "resent",  "stupid"};

// Calm bodies carry one word of their own tone and one of each of two other
// tones, and run to at least ten tokens, so every calm reply scores the same
// total intensity.
const std::map<std::string_view, Pool> kCalmTemplates = {
    {"joy",
     {"I am {w} with how the work on the {t} turned out, {v} and {u}",
      "What a {w} idea for the {t} this time around, {v} and {u}",
      "{f} the {t} looks {w} this year to all of us, {v} and {u}",
      "We had a {w} afternoon down at the {t} today, {v} and {u}"}},
    {"trust",
     {"That sounds {w} to me about the {t} this week, {v} and {u}",
      "{f} the idea for the {t} seems {w} to most of us, {v} and {u}",
      "I {w} with your take on the {t} and the rest, {v} and {u}",
      "The {t} numbers look {w} to me this month, {v} and {u}"}},
    {"anticipation",
     {"I {w} the {t} opens again next spring for us, {v} and {u}",
      "Looking {w} to the {t} vote at the next meeting, {v} and {u}",
      "{f} the {t} crew seems {w} for the next round, {v} and {u}",
      "We are {w} for the {t} meeting on the weekend, {v} and {u}"}},
    {"surprise",
     {"{w} the {t} was full again on a weekday, {v} and {u}",
      "That was {w} news about the {t} this morning, {v} and {u}",
      "{f} the {t} changed {w} over the last month, {v} and {u}",
      "Nobody saw that coming about the {t}, {w} to me, {v} and {u}"}},
    {"sadness",
     {"It is {w} that the {t} closed down this year, {v} and {u}",
      "{f} the old {t} is gone now, a bit {w} really, {v} and {u}",
      "The {t} looks {w} lately when I walk past it, {v} and {u}",
      "Such a {w} week for the {t} and the people there, {v} and {u}"}},
    {"neutral",
     {"Where is the {t} meeting held", "Does anyone know when the {t} opens", "{f} the {t} is on the agenda",
      "The {t} minutes are posted online", "Which street goes past the {t}"}},
};

// Flames are short and almost all anger words.
const Pool kHotTemplates = {
    "You {a} {a} {a}, {a} {t} people",
    "{a} {a} take, the {t} board are {a}",
    "Stop this {a} {t} nonsense you {a} {a}",
    "{a} {a}, whoever runs the {t} is a {a}",
    "The {t} is {a} {a} and you are {a}",
    "{a} {a} {a}, the {t} never stops",
};

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, n) by rejection, identical on every platform.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v = 0;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    double unit() { return static_cast<double>(gen_() >> 11U) * 0x1.0p-53; }

    template<typename T>
    const T& pick(const std::vector<T>& items) {
        return items[below(items.size())];
    }

  private:
    std::mt19937_64 gen_;
};

std::string fill(std::string_view pattern, Rng& rng, std::string_view tone) {
    // Companion tones for {v} and {u}: two distinct tones other than the main one.
    std::vector<std::string_view> others;
    std::string_view second;
    std::string_view third;
    if (kToneWords.contains(tone)) {
        for (const auto& [name, words] : kToneWords) {
            if (name != tone) {
                others.push_back(name);
            }
        }
        const std::size_t k = rng.below(others.size());
        second = others[k];
        others.erase(others.begin() + static_cast<std::ptrdiff_t>(k));
        third = others[rng.below(others.size())];
    }
    std::string out;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] != '{' || i + 2 >= pattern.size() || pattern[i + 2] != '}') {
            out.push_back(pattern[i]);
            continue;
        }
        switch (pattern[i + 1]) {
            case 't': out += rng.pick(kTopics); break;
            case 'f': out += rng.pick(kFiller); break;
            case 'w': out += rng.pick(kToneWords.at(tone)); break;
            case 'v': out += rng.pick(kToneWords.at(second)); break;
            case 'u': out += rng.pick(kToneWords.at(third)); break;
            case 'a': out += rng.pick(kAngerWords); break;
            default: out.append(pattern.substr(i, 3)); break;
        }
        i += 2;
    }
    if (!out.empty()) {
        out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    }
    return out;
}

std::string_view choose_tone(const SynthProfile& p, Rng& rng) {
    double total = 0.0;
    for (const double w : p.calm_mix) {
        total += w;
    }
    double u = rng.unit() * total;
    for (std::size_t k = 0; k < p.calm_mix.size(); ++k) {
        if (u < p.calm_mix[k]) {
            return kCalmTones[k];
        }
        u -= p.calm_mix[k];
    }
    for (std::size_t k = p.calm_mix.size(); k-- > 0;) {
        if (p.calm_mix[k] > 0.0) {
            return kCalmTones[k];
        }
    }
    return kCalmTones.back();
}

/// Marks which reply slots are hot: bursts spread over the thread after the lead-in.
std::vector<bool> place_hot(const SynthProfile& p, std::size_t replies, Rng& rng) {
    std::vector<bool> hot(replies, false);
    const auto quota = std::min<std::size_t>(static_cast<std::size_t>(std::llround(p.hot_fraction * static_cast<double>(p.size))),
                                             replies);
    if (quota == 0) {
        return hot;
    }
    const std::size_t lead = std::min(p.lead_in, replies - quota);
    std::vector<std::size_t> bursts;
    for (std::size_t left = quota; left > 0;) {
        const auto n = std::min<std::size_t>(left, static_cast<std::size_t>(rng.between(
                                                       static_cast<std::int64_t>(p.burst_min), static_cast<std::int64_t>(p.burst_max))));
        bursts.push_back(n);
        left -= n;
    }
    const std::size_t span = replies - lead;
    const std::size_t segment = span / bursts.size();
    std::size_t cursor = lead;
    std::size_t carried = 0;// hot comments that did not fit their segment
    for (std::size_t b = 0; b < bursts.size(); ++b) {
        const std::size_t seg_begin = lead + b * segment;
        const std::size_t seg_end = b + 1 == bursts.size() ? replies : seg_begin + segment;
        const std::size_t want = bursts[b] + carried;
        const auto region = std::min<std::size_t>(
            seg_end - std::max(seg_begin, cursor),
            std::max<std::size_t>(want, static_cast<std::size_t>(std::ceil(static_cast<double>(want) / p.burst_density))));
        const std::size_t begin = std::max(seg_begin, cursor);
        const std::size_t slack = seg_end - begin - region;
        const std::size_t start = begin + (slack > 0 ? rng.below(slack + 1) : 0);
        // Partial Fisher-Yates over the region picks `want` distinct slots.
        std::vector<std::size_t> slots(region);
        for (std::size_t k = 0; k < region; ++k) {
            slots[k] = start + k;
        }
        const std::size_t take = std::min(want, region);
        for (std::size_t k = 0; k < take; ++k) {
            std::swap(slots[k], slots[k + rng.below(region - k)]);
            hot[slots[k]] = true;
        }
        carried = want - take;
        cursor = start + region;
    }
    // Anything still carried goes to the latest free slots.
    for (std::size_t k = replies; carried > 0 && k > lead; --k) {
        if (!hot[k - 1]) {
            hot[k - 1] = true;
            --carried;
        }
    }
    return hot;
}

}// namespace

void SynthProfile::validate() const {
    if (size < 2) {
        throw Error(ErrorCode::config_error, "synthetic corpus size must be at least 2");
    }
    if (!(hot_fraction >= 0.0 && hot_fraction <= 1.0)) {
        throw Error(ErrorCode::config_error, "hot_fraction must lie in [0, 1]");
    }
    double total = 0.0;
    for (const double w : calm_mix) {
        if (!(w >= 0.0)) {
            throw Error(ErrorCode::config_error, "calm_mix weights must be non-negative");
        }
        total += w;
    }
    if (total <= 0.0) {
        throw Error(ErrorCode::config_error, "calm_mix needs a positive weight");
    }
    if (burst_min == 0 || burst_max < burst_min) {
        throw Error(ErrorCode::config_error, "burst sizes need 1 <= burst_min <= burst_max");
    }
    if (!(burst_density > 0.0 && burst_density <= 1.0)) {
        throw Error(ErrorCode::config_error, "burst_density must lie in (0, 1]");
    }
}

std::vector<CorpusRecord> synthesize_corpus(const SynthProfile& profile, std::uint64_t seed) {
    profile.validate();
    Rng rng(seed);
    const std::size_t replies = profile.size - 1;
    const std::vector<bool> hot = place_hot(profile, replies, rng);

    std::vector<CorpusRecord> out;
    out.reserve(profile.size);
    std::int64_t now = profile.start_utc;
    out.push_back(CorpusRecord{"c0000", "", "op", fill("What should the town do with the old {t}", rng, "neutral"), now});

    // Flames grow as side chains: a hot reply usually answers the previous
    // flame and otherwise starts a new chain under the post. Calm replies all
    // answer the post, so every calm window member carries the same influence.
    std::optional<std::size_t> last_hot;

    for (std::size_t k = 0; k < replies; ++k) {
        const bool is_hot = hot[k];
        const bool near_hot = is_hot || (k > 0 && hot[k - 1]) || (k + 1 < replies && hot[k + 1]);
        if (near_hot) {
            now += rng.between(1, 6);
        } else if (rng.unit() < 0.01) {
            now += rng.between(320, 900);
        } else {
            now += rng.between(4, 20);
        }
        CorpusRecord r;
        r.id = fmt::format("c{:04}", k + 1);
        r.author = fmt::format("user{:03}", rng.below(150));
        r.created_utc = now;
        std::size_t parent = 0;
        if (is_hot) {
            if (last_hot && rng.unit() >= 0.3) {
                parent = *last_hot;
            }
            r.body = fill(rng.pick(kHotTemplates), rng, "");
        } else {
            const std::string_view tone = choose_tone(profile, rng);
            r.body = fill(rng.pick(kCalmTemplates.at(tone)), rng, tone);
        }
        r.parent_id = out[parent].id;
        if (is_hot) {
            last_hot = out.size();
        } else if (!near_hot) {
            last_hot.reset();// a burst that has gone quiet is not resumed
        }
        out.push_back(std::move(r));
    }
    return out;
}

}// namespace emoq::replay
