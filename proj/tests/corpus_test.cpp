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

#include <emoq/corpus.hpp>
#include <emoq/error.hpp>
#include <emoq/lexicon.hpp>

#include <gtest/gtest.h>

#include <map>
#include <sstream>

namespace emoq::replay {
namespace {

Corpus parse(std::string_view text, CorpusFormat format = CorpusFormat::csv) {
    std::istringstream in{std::string(text)};
    return parse_corpus(in, format);
}

ErrorCode failure(std::string_view text, CorpusFormat format = CorpusFormat::csv) {
    try {
        (void)parse(text, format);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "accepted: " << text;
    return ErrorCode::load_error;
}

constexpr std::string_view kHeader = "id,parent_id,author,body,created_utc\n";

TEST(Corpus, ThreeRowCsv) {
    const auto c = parse(std::string(kHeader) + "b,r,bob,second,30\nr,,ann,the post,10\na,r,cy,\"first, quoted \"\"x\"\"\",20\n");
    ASSERT_EQ(c.records.size(), 3U);
    EXPECT_EQ(c.records[0].id, "r");
    EXPECT_EQ(c.records[1].id, "a");
    EXPECT_EQ(c.records[1].body, "first, quoted \"x\"");
    EXPECT_EQ(c.records[2].id, "b");
    EXPECT_EQ(c.dropped, 0U);
}

TEST(Corpus, OrphanDropped) {
    const auto c = parse(std::string(kHeader) + "r,,ann,post,10\na,r,bob,reply,20\nz,ghost,cy,orphan,30\n");
    EXPECT_EQ(c.records.size(), 2U);
    EXPECT_EQ(c.dropped, 1U);
}

TEST(Corpus, ReplyBeforeParentDropped) {
    const auto c = parse(std::string(kHeader) + "r,,ann,post,10\na,r,bob,reply,5\n");
    EXPECT_EQ(c.records.size(), 1U);
    EXPECT_EQ(c.dropped, 1U);
}

TEST(Corpus, ShapeErrors) {
    EXPECT_EQ(failure(std::string(kHeader) + "a,r,bob,reply,20\n"), ErrorCode::corpus_shape);
    EXPECT_EQ(failure(std::string(kHeader) + "r,,ann,post,10\nq,,bob,post,11\n"), ErrorCode::corpus_shape);
    EXPECT_EQ(failure(std::string(kHeader) + "r,,ann,post,ten\n"), ErrorCode::parse_error);
    EXPECT_EQ(failure("id,body\nr,x\n"), ErrorCode::parse_error);
    EXPECT_EQ(failure("{\"id\":\"r\"\n", CorpusFormat::jsonl), ErrorCode::parse_error);
}

TEST(Corpus, ParseErrorNamesRow) {
    try {
        (void)parse(std::string(kHeader) + "r,,ann,post,10\na,r,bob,reply,oops\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
    }
}

TEST(Corpus, JsonlMatchesCsv) {
    const auto records = synthesize_corpus(SynthProfile{.size = 50}, 3);
    std::ostringstream csv;
    std::ostringstream jsonl;
    write_corpus_csv(csv, records);
    write_corpus_jsonl(jsonl, records);
    EXPECT_EQ(parse(csv.str()).records, records);
    EXPECT_EQ(parse(jsonl.str(), CorpusFormat::jsonl).records, records);
}

// Oracle: a group-by over the raw file's parent_id column.
TEST(Corpus, BundledThreadTallies) {
    const auto c = load_corpus(testing::data_dir() / "corpus" / "hot_thread.csv", CorpusFormat::csv);
    EXPECT_EQ(c.records.size(), 2000U);
    EXPECT_EQ(c.dropped, 0U);
    std::map<std::string, std::size_t> tallies;
    for (const auto& r : c.records) {
        if (!r.parent_id.empty()) {
            ++tallies[r.parent_id];
        }
    }
    EXPECT_EQ(tallies.size(), 248U);
    EXPECT_EQ(tallies.at("c0000"), 1752U);
    std::size_t squares = 0;
    for (const auto& [parent, n] : tallies) {
        squares += n * n;
    }
    EXPECT_EQ(squares, 3069751U);

    const auto jsonl = load_corpus(testing::data_dir() / "corpus" / "hot_thread.jsonl", CorpusFormat::jsonl);
    EXPECT_EQ(jsonl.records, c.records);
}

TEST(Corpus, MissingFile) {
    try {
        (void)load_corpus("/nonexistent/thread.csv", CorpusFormat::csv);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::load_error);
    }
    EXPECT_THROW((void)corpus_format_from("xml"), Error);
}

std::size_t angry_bodies(const std::vector<CorpusRecord>& records) {
    const auto lexicon = testing::default_lexicon();
    std::size_t n = 0;
    for (const auto& r : records) {
        n += score_text(r.body, *lexicon)[0] > 0.0 ? 1 : 0;
    }
    return n;
}

TEST(Synth, CalmOnly) {
    const auto records = synthesize_corpus(SynthProfile{.size = 10, .hot_fraction = 0.0}, 7);
    EXPECT_EQ(records.size(), 10U);
    EXPECT_EQ(angry_bodies(records), 0U);
}

TEST(Synth, Deterministic) {
    const SynthProfile p{.size = 100, .hot_fraction = 0.2};
    std::ostringstream a;
    std::ostringstream b;
    write_corpus_csv(a, synthesize_corpus(p, 7));
    write_corpus_csv(b, synthesize_corpus(p, 7));
    EXPECT_EQ(a.str(), b.str());
    std::ostringstream c;
    write_corpus_csv(c, synthesize_corpus(p, 8));
    EXPECT_NE(a.str(), c.str());
}

TEST(Synth, ExactHotQuota) {
    EXPECT_EQ(angry_bodies(synthesize_corpus(SynthProfile{.size = 100, .hot_fraction = 0.2}, 7)), 20U);
    EXPECT_EQ(angry_bodies(synthesize_corpus(SynthProfile{.size = 2000, .hot_fraction = 0.2}, 20240607)), 400U);
}

TEST(Synth, WellFormedThread) {
    const auto records = synthesize_corpus(SynthProfile{.size = 500}, 9);
    std::ostringstream csv;
    write_corpus_csv(csv, records);
    const auto back = parse(csv.str());
    EXPECT_EQ(back.dropped, 0U);
    EXPECT_EQ(back.records.size(), 500U);
}

TEST(Synth, InvalidProfile) {
    EXPECT_THROW((void)synthesize_corpus(SynthProfile{.size = 1}, 1), Error);
    EXPECT_THROW((void)synthesize_corpus(SynthProfile{.hot_fraction = 1.5}, 1), Error);
    EXPECT_THROW((void)synthesize_corpus(SynthProfile{.burst_min = 9, .burst_max = 3}, 1), Error);
}

}// namespace
}// namespace emoq::replay
