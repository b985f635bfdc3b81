#include "arabiq/core/error.hpp"
#include "arabiq/core/validate.hpp"
#include "arabiq/parser/quiz_parser.hpp"

#include "support/fixtures.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>

using namespace arabiq;
using arabiq::parser::parse_quiz_block;
using arabiq::parser::serialize_quiz;
using arabiq::parser::serialize_quizzes;
using nlohmann::json;

namespace {

std::vector<std::string> golden_cases() {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(fixtures::testdata("quiz_blocks"))) {
    if (e.path().extension() == ".txt") names.push_back(e.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

class Golden : public ::testing::TestWithParam<std::string> {};

}  // namespace

TEST_P(Golden, MatchesExpected) {
  const std::string name = GetParam();
  const auto raw = fixtures::read_file(fixtures::testdata("quiz_blocks/" + name + ".txt"));
  const auto want = json::parse(fixtures::read_file(fixtures::testdata("quiz_blocks/" + name + ".json")));
  const auto got = parse_quiz_block(raw);

  ASSERT_EQ(got.quizzes.size(), want["quizzes"].size());
  for (std::size_t i = 0; i < got.quizzes.size(); ++i) {
    const Quiz& q = got.quizzes[i];
    const json& w = want["quizzes"][i];
    SCOPED_TRACE("quiz " + std::to_string(i));
    EXPECT_EQ(q.ordinal, w["ordinal"].get<int>());
    EXPECT_EQ(q.stem, w["stem"].get<std::string>());
    EXPECT_EQ(to_string(q.skill), w["skill"].get<std::string>());
    ASSERT_EQ(q.options.size(), 4u);
    for (const auto& o : q.options) {
      EXPECT_EQ(o.text_ar, w["options"][std::string(1, o.label)].get<std::string>()) << o.label;
    }
    EXPECT_EQ(std::string(1, q.declared_correct), w["declared_correct"].get<std::string>());
    EXPECT_EQ(q.declared_correct_text, w["declared_correct_text"].get<std::string>());
    EXPECT_TRUE(validate_quiz(q).ok());
  }

  ASSERT_EQ(got.diagnostics.size(), want["diagnostics"].size());
  for (std::size_t i = 0; i < got.diagnostics.size(); ++i) {
    const Diagnostic& d = got.diagnostics[i];
    const json& w = want["diagnostics"][i];
    SCOPED_TRACE("diagnostic " + std::to_string(i) + " " + d.code + ": " + d.message);
    EXPECT_EQ(d.code, w["code"].get<std::string>());
    EXPECT_EQ(d.line_no, w["line_no"].get<int>());
    EXPECT_EQ(d.ordinal, w["ordinal"].get<int>());
    if (w["label"].is_null()) {
      EXPECT_FALSE(d.label.has_value());
    } else {
      ASSERT_TRUE(d.label.has_value());
      EXPECT_EQ(std::string(1, *d.label), w["label"].get<std::string>());
    }
  }

  ASSERT_EQ(got.annotations.size(), want["annotations"].size());
  for (std::size_t i = 0; i < got.annotations.size(); ++i) {
    EXPECT_EQ(got.annotations[i].text, want["annotations"][i].get<std::string>());
  }
}

INSTANTIATE_TEST_SUITE_P(Corpus, Golden, ::testing::ValuesIn(golden_cases()),
                         [](const auto& info) { return info.param; });

TEST(Parser, SampleBlockExact) {
  const auto out = parse_quiz_block(fixtures::sample_block_text());
  EXPECT_TRUE(out.diagnostics.empty());
  ASSERT_EQ(out.quizzes.size(), 2u);
  EXPECT_EQ(out.quizzes[0], fixtures::sample_quiz1());
  EXPECT_EQ(out.quizzes[1], fixtures::sample_quiz2());
}

TEST(Parser, BidiControlsAreIgnored) {
  std::string noisy;
  for (char32_t cp : text::decode_utf8(fixtures::sample_block_text())) {
    text::append_utf8(noisy, cp);
    if (cp == U' ') text::append_utf8(noisy, U'‏');
  }
  noisy = "‫" + noisy + "⁩";
  EXPECT_EQ(parse_quiz_block(noisy).quizzes, parse_quiz_block(fixtures::sample_block_text()).quizzes);
}

TEST(Parser, SkillTagsSurvive) {
  for (auto skill : {SkillTag::Actions, SkillTag::Objects, SkillTag::Colors, SkillTag::Adjectives}) {
    Quiz q = fixtures::sample_quiz1();
    q.skill = skill;
    const auto out = parse_quiz_block(serialize_quiz(q));
    ASSERT_EQ(out.quizzes.size(), 1u);
    EXPECT_EQ(out.quizzes[0].skill, skill);
  }
  const auto out = parse_quiz_block(serialize_quiz(fixtures::sample_quiz1()));
  EXPECT_EQ(out.quizzes.at(0).skill, SkillTag::Untagged);
}

TEST(Parser, SerializeForm) {
  EXPECT_EQ(serialize_quiz(fixtures::sample_quiz1()),
            "- Question 1: What is the boy doing? a) يَكْتُبُ b) يَجْلِسُ c) يَأْكُلُ d) يَشْرَبُ "
            "Correct answer: a) يَكْتُبُ");
  Quiz bad = fixtures::sample_quiz1();
  bad.options.pop_back();
  EXPECT_THROW(serialize_quiz(bad), Error);
}

TEST(Parser, MissingCorrectAnswer) {
  const auto out = parse_quiz_block("Question 1: Which? a) أ b) ب c) ت d) ث");
  EXPECT_TRUE(out.quizzes.empty());
  EXPECT_TRUE(out.has(parser::codes::kMissingCorrect));
}

// parse(serialize(q)) == q for generated valid quizzes, singly and in batches.
TEST(ParserProperty, RoundTrip) {
  fixtures::Gen g(20250301);
  std::vector<Quiz> batch;
  for (int i = 0; i < 1000; ++i) {
    const Quiz q = g.valid_quiz();
    ASSERT_TRUE(validate_quiz(q).ok());
    const auto out = parse_quiz_block(serialize_quiz(q));
    ASSERT_TRUE(out.diagnostics.empty()) << serialize_quiz(q) << " -> " << out.diagnostics[0].code;
    ASSERT_EQ(out.quizzes.size(), 1u) << serialize_quiz(q);
    ASSERT_EQ(out.quizzes[0], q) << serialize_quiz(q);
    batch.push_back(q);
  }
  const auto all = parse_quiz_block(serialize_quizzes(batch));
  EXPECT_EQ(all.quizzes, batch);
}

// Arbitrary input never throws; whatever comes out is structurally valid and
// free of bidi controls.
TEST(ParserProperty, FuzzNeverThrows) {
  fixtures::Gen g(7);
  std::size_t emitted = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::string input = g.fuzz_text();
    parser::ParseOutcome out;
    ASSERT_NO_THROW(out = parse_quiz_block(input)) << input;
    for (const auto& q : out.quizzes) {
      ++emitted;
      ASSERT_TRUE(validate_quiz(q).ok()) << input;
      for (const auto& o : q.options) {
        ASSERT_EQ(o.text_ar, text::strip_bidi_controls(o.text_ar));
      }
    }
    if (out.quizzes.empty()) {
      ASSERT_FALSE(out.diagnostics.empty()) << input;
    }
  }
  RecordProperty("emitted", static_cast<int>(emitted));
}
