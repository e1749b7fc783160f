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

#include <emoq/config.hpp>
#include <emoq/error.hpp>

#include <gtest/gtest.h>

namespace emoq {
namespace {

std::string config_error(std::string_view text) {
    try {
        (void)parse_engine_settings(text);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::config_error);
        return e.what();
    }
    ADD_FAILURE() << "accepted: " << text;
    return {};
}

TEST(Config, BundledDefaults) {
    const auto s = testing::default_settings();
    const auto& c = s.engine;
    EXPECT_EQ(c.emotions, EmotionSet::nrc_default());
    EXPECT_EQ(c.thresholds.base, ThresholdParams::defaults_for(c.emotions).base);
    EXPECT_EQ(c.window_size, 100U);
    EXPECT_EQ(c.activity_window, 20U);
    EXPECT_EQ(c.reeval_limit, 10U);
    EXPECT_DOUBLE_EQ(c.thresholds.alpha, 0.2);
    EXPECT_DOUBLE_EQ(c.thresholds.idle_step, 1.0);
    EXPECT_DOUBLE_EQ(c.weights.damping, 0.85);
    EXPECT_DOUBLE_EQ(c.weights.tolerance, 1e-8);
    EXPECT_TRUE(std::filesystem::exists(s.lexicon_path));
    EXPECT_TRUE(std::filesystem::exists(s.emoji_path));
}

TEST(Config, EmptyDocumentIsDefault) {
    const auto s = parse_engine_settings("{}");
    EXPECT_EQ(s.engine.thresholds.base, ThresholdParams::defaults_for(EmotionSet::nrc_default()).base);
}

TEST(Config, ErrorsNameTheKey) {
    EXPECT_NE(config_error(R"({"alpah": 0.1})").find("'alpah'"), std::string::npos);
    EXPECT_NE(config_error(R"({"thresholds": {"base": {"rage": 40}}})").find("'thresholds.base.rage'"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"window_size": "big"})").find("'window_size'"), std::string::npos);
    EXPECT_NE(config_error(R"({"pagerank": {"dampng": 0.8}})").find("'pagerank.dampng'"), std::string::npos);
    EXPECT_NE(config_error(R"({"min_basis": -1})").find("'min_basis'"), std::string::npos);
    config_error("not json");
    config_error("[1, 2]");
    config_error(R"({"weights": {"replies": 0.9}})");
    config_error(R"({"window_size": 0})");
}

TEST(Config, OverridesApplyOnTop) {
    auto s = testing::default_settings();
    apply_overrides(s, R"({"thresholds": {"base": {"anger": 40}}, "min_basis": 2})");
    EXPECT_EQ(s.engine.thresholds.base[0], 40.0);
    EXPECT_EQ(s.engine.thresholds.base[1], 60.0);
    EXPECT_EQ(s.engine.min_basis, 2U);
}

TEST(Config, FailedOverrideLeavesSettings) {
    auto s = testing::default_settings();
    const auto before = to_json(s);
    EXPECT_THROW(apply_overrides(s, R"({"min_basis": 3, "bogus": 1})"), Error);
    EXPECT_EQ(to_json(s), before);
}

TEST(Config, CustomEmotionSetRelaysThresholds) {
    const auto s = parse_engine_settings(R"({"emotion_set": ["joy", "anger"], "thresholds": {"base": {"joy": 65}}})");
    EXPECT_EQ(s.engine.emotions.size(), 2U);
    EXPECT_EQ(s.engine.thresholds.base, (std::vector<double>{65.0, 50.0}));
}

TEST(Config, JsonRoundTrip) {
    auto s = testing::default_settings();
    apply_overrides(s, R"({"alpha": 0.1, "trend_adjustment": {"enabled": true}})");
    const auto text = to_json(s);
    const auto back = parse_engine_settings(text);
    EXPECT_EQ(to_json(back), text);
    EXPECT_TRUE(back.engine.thresholds.trend_enabled);
}

TEST(Config, ForeignSectionsSkipped) {
    EXPECT_NO_THROW((void)parse_engine_settings(R"({"replay": {"anything": 1}})", {}, {"replay"}));
    config_error(R"({"replay": {"anything": 1}})");
}

TEST(Config, MissingFile) {
    try {
        (void)load_engine_settings("/nonexistent/config.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::load_error);
    }
}

}// namespace
}// namespace emoq
