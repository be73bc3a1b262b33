#include "llmdep/prompts.h"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "llmdep/decoder.h"
#include "llmdep/errors.h"
#include "test_util.h"

namespace llmdep {
namespace {

using testing::ExampleSentence;
using testing::ReadText;

std::string GoldenPath(const std::string& name) {
  return std::string(LLMDEP_GOLDEN_DIR) + "/prompts_v1/" + name;
}

// Compares against a golden file. Set LLMDEP_UPDATE_GOLDEN=1 to (re)write
// files that have no external source.
void ExpectGolden(const std::string& name, const std::string& actual,
                  bool updatable) {
  const std::string path = GoldenPath(name);
  if (updatable && std::getenv("LLMDEP_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(path, std::ios::binary) << actual;
  }
  const std::string expected = ReadText(path);
  ASSERT_FALSE(expected.empty()) << "missing golden file " << path;
  EXPECT_EQ(actual, expected);
}

PromptBundle ExampleBundle(int steps) {
  return BuildPrompt(ExampleSentence(), StepPlan::FromSteps(steps),
                     LanguageProfile::ForCode("en_ewt"));
}

std::vector<std::string> WordList(const std::string& user) {
  const size_t start = user.find("\nwords:\n");
  std::vector<std::string> words;
  std::istringstream in(user.substr(start + 8));
  std::string line;
  while (std::getline(in, line) && !line.empty()) words.push_back(line);
  return words;
}

TEST(BuildPrompt, OneStepMatchesGolden) {
  ExpectGolden("one_step.txt", RenderBundle(ExampleBundle(1)), false);
}

TEST(BuildPrompt, ThreeStepMatchesGolden) {
  const PromptBundle bundle = ExampleBundle(3);
  ExpectGolden("three_step.txt", RenderBundle(bundle), false);
  const std::string& reply = bundle.gold_assistant;
  const std::string last_row = "\n6\t.\tPUNCT\t4\tpunct";
  ASSERT_GE(reply.size(), last_row.size());
  EXPECT_EQ(reply.substr(reply.size() - last_row.size()), last_row);
  EXPECT_NE(reply.find("- Task 3\n1\tI\tPRON\t4\tnsubj\n"), std::string::npos);
}

TEST(BuildPrompt, TwoStepIsStable) {
  const PromptBundle bundle = ExampleBundle(2);
  EXPECT_NE(bundle.gold_assistant.find("- Task 1\n1\tI\tPRON\n"),
            std::string::npos);
  EXPECT_NE(bundle.gold_assistant.find("- Task 2\n1\tI\tPRON\t4\tnsubj\n"),
            std::string::npos);
  EXPECT_EQ(bundle.gold_assistant.find("- Task 3"), std::string::npos);
  ExpectGolden("two_step.txt", RenderBundle(bundle), true);
}

TEST(BuildPrompt, SingleToken) {
  Sentence s;
  s.sent_id = "go";
  s.tokens = {{1, "Go", "VERB", 0, "root"}};
  for (int steps = 1; steps <= 3; ++steps) {
    const PromptBundle b = BuildPrompt(s, StepPlan::FromSteps(steps),
                                       LanguageProfile::ForCode("en"));
    EXPECT_EQ(WordList(b.user), std::vector<std::string>{"Go"});
    EXPECT_EQ(b.n_words, 1u);
    const std::string tail = "1\tGo\tVERB\t0\troot";
    EXPECT_EQ(b.gold_assistant.substr(b.gold_assistant.size() - tail.size()),
              tail);
    std::string flat = b.user;
    std::replace(flat.begin(), flat.end(), '\n', ' ');
    EXPECT_NE(flat.find("word index from 1 to 1 "), std::string::npos);
  }
}

TEST(BuildPrompt, EmptySentenceIsRejected) {
  EXPECT_THROW(BuildPrompt(Sentence{}, StepPlan::FromSteps(1),
                           LanguageProfile::ForCode("en")),
               FormatError);
}

TEST(BuildPrompt, LanguageSubstitution) {
  const PromptBundle de = BuildPrompt(ExampleSentence(), StepPlan::FromSteps(1),
                                      LanguageProfile::ForCode("de_gsd"));
  EXPECT_EQ(de.system.rfind("You are a German linguist", 0), 0u);
  EXPECT_NE(de.system.find("German dependency analysis"), std::string::npos);
  EXPECT_EQ(de.system.find("English"), std::string::npos);
  const PromptBundle custom =
      BuildPrompt(ExampleSentence(), StepPlan::FromSteps(1),
                  LanguageProfile::Custom("xx", "Old Irish"));
  EXPECT_EQ(custom.system.rfind("You are an Old Irish linguist", 0), 0u);
  EXPECT_THROW(LanguageProfile::ForCode("qq_unknown"), ConfigError);
  EXPECT_THROW(LanguageProfile::Custom("xx", ""), ConfigError);
}

TEST(BuildPrompt, PureFunction) {
  for (int steps = 1; steps <= 3; ++steps) {
    const PromptBundle a = ExampleBundle(steps);
    const PromptBundle b = ExampleBundle(steps);
    EXPECT_EQ(RenderBundle(a), RenderBundle(b));
  }
}

TEST(StepPlan, Shapes) {
  EXPECT_EQ(StepPlan::FromSteps(1).BlockWidths(), (std::vector<size_t>{5}));
  EXPECT_EQ(StepPlan::FromSteps(2).BlockWidths(), (std::vector<size_t>{3, 5}));
  EXPECT_EQ(StepPlan::FromSteps(3).BlockWidths(),
            (std::vector<size_t>{3, 4, 5}));
  EXPECT_THROW(StepPlan::FromSteps(0), ConfigError);
  EXPECT_THROW(StepPlan::FromSteps(4), ConfigError);
}

// Every fixture sentence, every plan: the gold reply decodes back to the
// source tree and the word list has one entry per token.
TEST(BuildPrompt, GoldRoundTripOverFixtures) {
  for (const std::string& code : testing::MultilingualFixtureFiles()) {
    const Treebank tb = ReadConlluFile(testing::FixturePath(code), code);
    const LanguageProfile lang = LanguageProfile::ForCode(code);
    for (int steps = 1; steps <= 3; ++steps) {
      const StepPlan plan = StepPlan::FromSteps(steps);
      for (const Sentence& s : tb.sentences) {
        const PromptBundle b = BuildPrompt(s, plan, lang);
        EXPECT_EQ(WordList(b.user), s.Forms()) << s.sent_id;
        const Decoded d = DecodeCompletion(b.gold_assistant, s, plan);
        ASSERT_EQ(d.system.sentence.tokens, s.tokens) << s.sent_id;
        EXPECT_TRUE(d.system.validity.Clean()) << s.sent_id;
      }
    }
  }
}

TEST(SftExport, RecordsAndShape) {
  testing::TreeGenerator gen(11);
  const Treebank train = gen.Corpus(30, 1, 12);
  const Treebank test = gen.Corpus(7, 1, 12, "xx_test");
  const LanguageProfile lang = LanguageProfile::Custom("xx", "Testish");
  const StepPlan plan = StepPlan::FromSteps(3);

  std::ostringstream only_train;
  EXPECT_EQ(ExportSft(train, plan, lang, nullptr, only_train), 30u);
  std::ostringstream both;
  EXPECT_EQ(ExportSft(train, plan, lang, &test, both), 37u);

  std::istringstream in(both.str());
  std::string line;
  size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    const nlohmann::json j = nlohmann::json::parse(line);
    ASSERT_EQ(j.size(), 1u);
    const auto& messages = j.at("messages");
    ASSERT_EQ(messages.size(), 3u);
    EXPECT_EQ(messages[0].at("role"), "system");
    EXPECT_EQ(messages[1].at("role"), "user");
    EXPECT_EQ(messages[2].at("role"), "assistant");
  }
  EXPECT_EQ(lines, 37u);
  EXPECT_EQ(both.str().rfind(only_train.str(), 0), 0u);

  std::ostringstream empty;
  EXPECT_EQ(ExportSft(Treebank{}, plan, lang, nullptr, empty), 0u);
  EXPECT_EQ(empty.str(), "");
}

TEST(SftExport, RecordContentMatchesBundle) {
  const PromptBundle b = ExampleBundle(3);
  const nlohmann::json j = nlohmann::json::parse(SftRecordJson(b));
  EXPECT_EQ(j["messages"][0]["content"], b.system);
  EXPECT_EQ(j["messages"][1]["content"], b.user);
  EXPECT_EQ(j["messages"][2]["content"], b.gold_assistant);
}

TEST(CurveLadder, NestedFiles) {
  testing::TreeGenerator gen(12);
  const Treebank tb = gen.Corpus(400, 1, 3);
  const std::vector<size_t> sizes = {10, 25, 100, 400};
  const auto ladder =
      ExportCurveLadder(tb, sizes, 5, StepPlan::FromSteps(3),
                        LanguageProfile::Custom("xx", "Testish"));
  ASSERT_EQ(ladder.size(), sizes.size());
  std::set<std::string> previous;
  for (size_t i = 0; i < ladder.size(); ++i) {
    EXPECT_EQ(ladder[i].size, sizes[i]);
    EXPECT_EQ(ladder[i].name, "sft_n" + std::to_string(sizes[i]) + ".jsonl");
    EXPECT_EQ(ladder[i].sent_ids.size(), sizes[i]);
    const size_t lines = std::count(ladder[i].jsonl.begin(),
                                    ladder[i].jsonl.end(), '\n');
    EXPECT_EQ(lines, sizes[i]);
    const std::set<std::string> ids(ladder[i].sent_ids.begin(),
                                    ladder[i].sent_ids.end());
    EXPECT_EQ(ids.size(), sizes[i]);
    EXPECT_TRUE(std::includes(ids.begin(), ids.end(), previous.begin(),
                              previous.end()));
    previous = ids;

    std::vector<std::string> expected;
    for (const Sentence& s : Subsample(tb, sizes[i], 5).sentences) {
      expected.push_back(s.sent_id);
    }
    EXPECT_EQ(ladder[i].sent_ids, expected);
  }
}

TEST(CurveLadder, FullCorpusAndErrors) {
  testing::TreeGenerator gen(13);
  const Treebank tb = gen.Corpus(20, 1, 3);
  const StepPlan plan = StepPlan::FromSteps(1);
  const LanguageProfile lang = LanguageProfile::Custom("xx", "Testish");
  const auto full = ExportCurveLadder(tb, {20}, 1, plan, lang);
  ASSERT_EQ(full.size(), 1u);
  std::ostringstream direct;
  ExportSft(tb, plan, lang, nullptr, direct);
  EXPECT_EQ(full[0].jsonl, direct.str());
  EXPECT_THROW(ExportCurveLadder(tb, {10, 5}, 1, plan, lang), ConfigError);
  EXPECT_THROW(ExportCurveLadder(tb, {10, 10}, 1, plan, lang), ConfigError);
  EXPECT_THROW(ExportCurveLadder(tb, {21}, 1, plan, lang), ConfigError);
}

}  // namespace
}  // namespace llmdep
