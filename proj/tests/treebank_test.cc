#include "llmdep/treebank.h"

#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "llmdep/errors.h"
#include "test_util.h"

namespace llmdep {
namespace {

using testing::DataPath;
using testing::ExampleSentence;
using testing::TreeGenerator;

TEST(ParseConllu, ExampleBlock) {
  const Treebank tb = ReadConlluFile(DataPath("example_sentence.conllu"));
  ASSERT_EQ(tb.sentences.size(), 1u);
  const Sentence& s = tb.sentences[0];
  EXPECT_EQ(s.sent_id, "weblog-example-0001");
  EXPECT_EQ(s.text, "I'm just speculating now.");
  ASSERT_EQ(s.size(), 6u);
  EXPECT_EQ(s.tokens, ExampleSentence().tokens);
  EXPECT_EQ(s.tokens[3].head, 0);
  EXPECT_EQ(s.tokens[3].form, "speculating");
}

TEST(ParseConllu, EmptyInput) {
  EXPECT_TRUE(ParseConlluString("").sentences.empty());
  EXPECT_TRUE(ParseConlluString("\n\n").sentences.empty());
}

TEST(ParseConllu, DropsRangeLinesAndEmptyNodes) {
  const std::string text =
      "# text = don't\n"
      "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tdo\tdo\tAUX\t_\t_\t0\troot\t_\t_\n"
      "1.1\tgo\tgo\tVERB\t_\t_\t_\t_\t0:root\t_\n"
      "2\tn't\tnot\tPART\t_\t_\t1\tadvmod\t_\t_\n"
      "\n";
  const Treebank tb = ParseConlluString(text);
  ASSERT_EQ(tb.sentences.size(), 1u);
  const Sentence& s = tb.sentences[0];
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.tokens[0].form, "do");
  EXPECT_EQ(s.tokens[1].form, "n't");
  EXPECT_EQ(s.tokens[1].head, 1);
  EXPECT_EQ(s.sent_id, "s1");
}

TEST(ParseConllu, ToleratesCrlfAndMissingFinalBlankLine) {
  const Treebank tb = ParseConlluString(
      "# sent_id = a\r\n1\tGo\tgo\tVERB\t_\t_\t0\troot\t_\t_\r\n");
  ASSERT_EQ(tb.sentences.size(), 1u);
  EXPECT_EQ(tb.sentences[0].tokens[0].deprel, "root");
}

TEST(ParseConllu, RejectsMalformedInput) {
  EXPECT_THROW(ParseConlluString("1\tGo\tgo\tVERB\t_\t0\troot\n"),
               FormatError);
  EXPECT_THROW(ParseConlluString("x\tGo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n"),
               FormatError);
  EXPECT_THROW(ParseConlluString("1\tGo\tgo\tVERB\t_\t_\tz\troot\t_\t_\n"),
               FormatError);
  // Head beyond N.
  EXPECT_THROW(ParseConlluString("1\tGo\tgo\tVERB\t_\t_\t2\troot\t_\t_\n"),
               FormatError);
  // Self-loop.
  EXPECT_THROW(ParseConlluString("1\tGo\tgo\tVERB\t_\t_\t1\troot\t_\t_\n"),
               FormatError);
  // Ids out of order.
  EXPECT_THROW(ParseConlluString("1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n"
                                 "3\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n"),
               FormatError);
  EXPECT_THROW(ParseConlluString("# sent_id = a\n1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n"
                                 "\n# sent_id = a\n"
                                 "1\tb\tb\tX\t_\t_\t0\troot\t_\t_\n"),
               FormatError);
}

TEST(ParseConllu, LenientModeMarksBadHeads) {
  ConlluReadOptions lenient;
  lenient.lenient = true;
  const Treebank tb = ParseConlluString(
      "1\ta\ta\tX\t_\t_\t7\troot\t_\t_\n2\tb\tb\tX\t_\t_\t_\tdep\t_\t_\n", "",
      Split::kTest, lenient);
  ASSERT_EQ(tb.sentences[0].size(), 2u);
  EXPECT_EQ(tb.sentences[0].tokens[0].head, kInvalidHead);
  EXPECT_EQ(tb.sentences[0].tokens[1].head, kInvalidHead);
}

TEST(ReadConlluFile, MissingFileIsIoError) {
  EXPECT_THROW(ReadConlluFile("/nonexistent/x.conllu"), IoError);
}

TEST(WriteConllu, ExampleRoundTrip) {
  const Treebank tb = ReadConlluFile(DataPath("example_sentence.conllu"));
  const std::string text = WriteConlluString(tb);
  EXPECT_EQ(ParseConlluString(text), tb);
  EXPECT_NE(text.find("4\tspeculating\t_\tVERB\t_\t_\t0\troot\t_\t_\n"),
            std::string::npos);
}

TEST(WriteConllu, EmptyTreebank) { EXPECT_EQ(WriteConlluString({}), ""); }

TEST(WriteConllu, RandomRoundTrip) {
  TreeGenerator gen(7);
  const Treebank tb = gen.Corpus(100, 1, 30);
  const std::string text = WriteConlluString(tb);
  const Treebank back = ParseConlluString(text, tb.language_code);
  EXPECT_EQ(back, tb);
  EXPECT_EQ(WriteConlluString(back), text);
}

TEST(WriteConllu, FixtureRoundTripOnRetainedFields) {
  for (const std::string& code : testing::MultilingualFixtureFiles()) {
    const Treebank tb = ReadConlluFile(testing::FixturePath(code), code);
    EXPECT_EQ(ParseConlluString(WriteConlluString(tb), code), tb) << code;
    for (const Sentence& s : tb.sentences) EXPECT_NO_THROW(ValidateSentence(s));
  }
}

TEST(Stats, Counts) {
  EXPECT_EQ(ComputeStats({}), (CorpusStats{0, 0}));
  TreeGenerator gen(1);
  Treebank tb;
  for (int n = 1; n <= 3; ++n) {
    tb.sentences.push_back(gen.Tree(n, "s" + std::to_string(n)));
  }
  const CorpusStats stats = ComputeStats(tb);
  EXPECT_EQ(stats, (CorpusStats{3, 6}));
  EXPECT_EQ(StatsTsv(stats), "n_sentences\t3\nn_tokens\t6\n");
  EXPECT_EQ(StatsJson(stats), R"({"n_sentences":3,"n_tokens":6})");
}

TEST(Subsample, SizeAndOrder) {
  TreeGenerator gen(3);
  const Treebank tb = gen.Corpus(12544, 1, 1);
  const Treebank sample = Subsample(tb, 125, 1);
  ASSERT_EQ(sample.sentences.size(), 125u);
  // Subset of the input, in corpus order.
  size_t cursor = 0;
  for (const Sentence& s : sample.sentences) {
    while (cursor < tb.sentences.size() && tb.sentences[cursor].sent_id != s.sent_id) {
      ++cursor;
    }
    ASSERT_LT(cursor, tb.sentences.size()) << s.sent_id;
    EXPECT_EQ(tb.sentences[cursor], s);
    ++cursor;
  }
}

TEST(Subsample, FullSizeIsIdentity) {
  TreeGenerator gen(4);
  const Treebank tb = gen.Corpus(50, 1, 5);
  EXPECT_EQ(Subsample(tb, 50, 99), tb);
  EXPECT_THROW(Subsample(tb, 51, 99), ConfigError);
}

TEST(Subsample, DeterministicAndSeedSensitive) {
  TreeGenerator gen(5);
  const Treebank tb = gen.Corpus(1000, 1, 2);
  int differing = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const Treebank a = Subsample(tb, 100, seed);
    EXPECT_EQ(a, Subsample(tb, 100, seed));
    if (a != Subsample(tb, 100, seed + 1000)) ++differing;
  }
  EXPECT_EQ(differing, 20);
}

TEST(KeptCount, CeilRule) {
  EXPECT_EQ(KeptCount(0.5, 100), 50u);
  EXPECT_EQ(KeptCount(0.17, 100), 17u);
  EXPECT_EQ(KeptCount(0.333, 100), 34u);
  EXPECT_EQ(KeptCount(1.0, 87), 87u);
  EXPECT_EQ(KeptCount(0.0, 87), 0u);
  EXPECT_EQ(KeptCount(0.17, 68495), 11645u);
}

TEST(Mix, HalfOfOnePart) {
  TreeGenerator gen(6);
  const Treebank a = gen.Corpus(100, 1, 4, "aa_one");
  const Treebank b = gen.Corpus(100, 1, 4, "bb_two");
  const MixedTreebank mixed = MixMultilingual({a, b}, {{"bb_two", 0.5}}, 1);
  EXPECT_EQ(mixed.treebank.sentences.size(), 150u);
  EXPECT_EQ(mixed.sentence_languages.size(), 150u);
  ASSERT_EQ(mixed.provenance.size(), 2u);
  EXPECT_EQ(mixed.provenance[1].kept, 50u);
  int64_t kept_tokens = 0;
  size_t kept = 0;
  for (const PartProvenance& p : mixed.provenance) {
    kept += p.kept;
    kept_tokens += p.kept_tokens;
  }
  const CorpusStats stats = ComputeStats(mixed.treebank);
  EXPECT_EQ(static_cast<size_t>(stats.n_sentences), kept);
  EXPECT_EQ(stats.n_tokens, kept_tokens);
  EXPECT_EQ(mixed.treebank.language_code, "multi");
}

TEST(Mix, SingleTreebankIsIdentity) {
  TreeGenerator gen(8);
  const Treebank a = gen.Corpus(40, 1, 6, "aa_one");
  const MixedTreebank mixed = MixMultilingual({a}, {}, 3);
  EXPECT_EQ(mixed.treebank, a);
}

TEST(Mix, CollidingIdsAreQualified) {
  Treebank a = ParseConlluString("# sent_id = x\n1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n",
                                 "aa_one");
  Treebank b = a;
  b.language_code = "bb_two";
  const MixedTreebank mixed = MixMultilingual({a, b}, {}, 1);
  ASSERT_EQ(mixed.treebank.sentences.size(), 2u);
  EXPECT_EQ(mixed.treebank.sentences[0].sent_id, "x");
  EXPECT_EQ(mixed.treebank.sentences[1].sent_id, "bb_two/x");
}

TEST(Mix, RejectsBadConfig) {
  TreeGenerator gen(9);
  const Treebank a = gen.Corpus(10, 1, 2, "aa_one");
  EXPECT_THROW(MixMultilingual({a, a}, {}, 1), ConfigError);
  EXPECT_THROW(MixMultilingual({a}, {{"zz", 0.5}}, 1), ConfigError);
  EXPECT_THROW(MixMultilingual({a}, {{"aa_one", 1.5}}, 1), ConfigError);
  EXPECT_THROW(MixMultilingual({a}, {{"aa_one", -0.1}}, 1), ConfigError);
}

TEST(Paths, LanguageAndSplit) {
  EXPECT_EQ(LanguageCodeFromPath("/ud/UD_English-EWT/en_ewt-ud-train.conllu"),
            "en_ewt");
  EXPECT_EQ(LanguageCodeFromPath("other.conllu"), "");
  EXPECT_EQ(SplitFromPath("cs_pdt-ud-test.conllu"), Split::kTest);
  EXPECT_EQ(SplitFromPath("cs_pdt-ud-dev.conllu"), Split::kDev);
  EXPECT_EQ(SplitFromPath("cs_pdt-ud-train-ca.conllu"), Split::kTrain);
  EXPECT_EQ(ParseSplit(SplitName(Split::kDev)), Split::kDev);
  EXPECT_THROW(ParseSplit("validation"), ConfigError);
}

}  // namespace
}  // namespace llmdep
