#include "cli.h"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "test_util.h"

namespace llmdep::cli {
namespace {

namespace fs = std::filesystem;
using llmdep::testing::DataPath;
using llmdep::testing::FixturePath;
using llmdep::testing::ReadText;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "llmdep");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() /
            ("llmdep_cli_" + std::string(info->name()) + "_" +
             std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string Dir(const std::string& name) const {
    return (root_ / name).string();
  }
  std::string Write(const std::string& name, const std::string& content) {
    const std::string path = Dir(name);
    std::ofstream(path, std::ios::binary) << content;
    return path;
  }

  fs::path root_;
};

const std::string kEn = FixturePath("en_fixture");

size_t Lines(const std::string& text) {
  return static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST_F(CliTest, ScoreGoldAgainstGold) {
  const Result r = Cli({"score", "--treebank", kEn, "--system", kEn});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "100.0\t100.0\t100.0\t100.0\n");
}

TEST_F(CliTest, OraclePipeline) {
  const std::string out = Dir("p");
  const Result r = Cli({"pipeline", "--treebank", kEn, "--mock", "oracle",
                        "--steps", "3", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "100.0\t100.0\t100.0\t100.0\n");
  const std::string validity = ReadText(out + "/validity.tsv");
  ASSERT_EQ(Lines(validity), 51u);
  std::istringstream in(validity);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const std::string tail = line.substr(line.find('\t'));
    EXPECT_EQ(tail.substr(tail.find('\t', 1)), "\t1\t0\t0\t0") << line;
  }
  EXPECT_EQ(ReadText(out + "/report.tsv"),
            "token_recall\tupos\tuas\tlas\n100.0\t100.0\t100.0\t100.0\n");
  EXPECT_EQ(Lines(ReadText(out + "/completions.jsonl")), 50u);
  EXPECT_EQ(Lines(ReadText(out + "/sft.jsonl")), 50u);
  for (const char* name : {"recovered.conllu", "validity.jsonl", "report.json",
                           "manifest.json"}) {
    EXPECT_TRUE(fs::exists(out + "/" + name)) << name;
  }
}

TEST_F(CliTest, ManifestRecordsProvenance) {
  const std::string out = Dir("m");
  ASSERT_EQ(Cli({"export-sft", "--treebank", kEn, "--seed", "42", "--out", out})
                .code,
            kExitOk);
  const auto m = nlohmann::json::parse(ReadText(out + "/manifest.json"));
  EXPECT_EQ(m["command"], "export-sft");
  EXPECT_EQ(m["seed"], 42);
  EXPECT_EQ(m["template_version"], "v1");
  EXPECT_EQ(m["config_hash"].get<std::string>().size(), 64u);
  ASSERT_EQ(m["inputs"].size(), 1u);
  EXPECT_EQ(m["inputs"][0]["path"], kEn);
  ASSERT_EQ(m["artifacts"].size(), 1u);
  EXPECT_EQ(m["artifacts"][0]["name"], "sft.jsonl");
}

TEST_F(CliTest, ExportSftCounts) {
  const std::string a = Dir("a"), b = Dir("b");
  const Result r = Cli({"export-sft", "--treebank", kEn, "--steps", "3",
                        "--out", a});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "records\t50\n");
  EXPECT_EQ(Lines(ReadText(a + "/sft.jsonl")), 50u);
  const Result both =
      Cli({"export-sft", "--treebank", kEn, "--include-test",
           FixturePath("de_fixture"), "--lang", "en", "--out", b});
  ASSERT_EQ(both.code, kExitOk) << both.err;
  EXPECT_EQ(Lines(ReadText(b + "/sft.jsonl")), 75u);
}

TEST_F(CliTest, ReproducibleArtifacts) {
  auto run = [&](const std::string& out) {
    return Cli({"pipeline", "--treebank", kEn, "--mock", "noisy", "--seed", "9",
                "--p-head-error", "0.2", "--p-drop-row", "0.05",
                "--p-cycle", "0.1", "--max-in-flight", "8", "--out", out});
  };
  ASSERT_EQ(run(Dir("x")).code, kExitOk);
  ASSERT_EQ(run(Dir("y")).code, kExitOk);
  size_t files = 0;
  for (const auto& entry : fs::directory_iterator(Dir("x"))) {
    const std::string name = entry.path().filename().string();
    EXPECT_EQ(ReadText(entry.path().string()), ReadText(Dir("y") + "/" + name))
        << name;
    ++files;
  }
  EXPECT_GE(files, 8u);
}

TEST_F(CliTest, DecodeThenScoreEqualsPipeline) {
  const std::string p = Dir("p"), d = Dir("d"), s = Dir("s");
  ASSERT_EQ(Cli({"pipeline", "--treebank", kEn, "--mock", "noisy",
                 "--p-head-error", "0.3", "--p-field-count", "0.1",
                 "--p-form-error", "0.2", "--steps", "2", "--out", p})
                .code,
            kExitOk);
  const std::string completions = p + "/completions.jsonl";
  ASSERT_EQ(Cli({"decode", "--treebank", kEn, "--completions", completions,
                 "--steps", "2", "--out", d})
                .code,
            kExitOk);
  const Result scored = Cli({"score", "--treebank", kEn, "--completions",
                             completions, "--steps", "2", "--out", s});
  ASSERT_EQ(scored.code, kExitOk) << scored.err;
  EXPECT_EQ(ReadText(p + "/report.json"), ReadText(s + "/report.json"));
  EXPECT_EQ(ReadText(p + "/recovered.conllu"), ReadText(d + "/recovered.conllu"));
  EXPECT_EQ(ReadText(p + "/validity.tsv"), ReadText(d + "/validity.tsv"));
  const std::string tsv = ReadText(p + "/report.tsv");
  EXPECT_EQ(scored.out, tsv.substr(tsv.find('\n') + 1));
}

TEST_F(CliTest, StatsAndSubsample) {
  Result r = Cli({"stats", "--treebank", DataPath("example_sentence.conllu")});
  EXPECT_EQ(r.out, "n_sentences\t1\nn_tokens\t6\n");
  r = Cli({"stats", "--treebank", kEn, "--treebank", FixturePath("ja_fixture")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
            "treebank\tsplit\tn_sentences\tn_tokens");
  EXPECT_NE(r.out.find("ja_fixture\ttest\t25\t"), std::string::npos);

  r = Cli({"subsample", "--treebank", kEn, "-n", "10", "--out", Dir("s")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.substr(0, 15), "n_sentences\t10\n");
  r = Cli({"subsample", "--treebank", kEn, "-n", "51", "--out", Dir("t")});
  EXPECT_EQ(r.code, kExitConfig);
}

TEST_F(CliTest, MixWithDownsampling) {
  const Result r = Cli({"mix", "--treebank", FixturePath("de_fixture"),
                        "--treebank", FixturePath("ru_fixture"),
                        "--downsample", "ru_fixture=0.17", "--out", Dir("m")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.substr(0, 15), "n_sentences\t30\n");
  const std::string prov = ReadText(Dir("m") + "/provenance.tsv");
  EXPECT_NE(prov.find("ru_fixture\t25\t5\t"), std::string::npos);
  EXPECT_EQ(Lines(ReadText(Dir("m") + "/sft.jsonl")), 30u);
  EXPECT_NE(ReadText(Dir("m") + "/sft.jsonl").find("Russian linguist"),
            std::string::npos);
  EXPECT_EQ(Cli({"mix", "--treebank", kEn, "--downsample", "en_fixture:0.5",
                 "--out", Dir("n")})
                .code,
            kExitConfig);
}

TEST_F(CliTest, CurveExport) {
  const Result r = Cli({"curve-export", "--treebank", kEn, "--sizes",
                        "5,20,50", "--out", Dir("c")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::set<std::string> previous;
  for (int size : {5, 20, 50}) {
    const std::string base = Dir("c") + "/sft_n" + std::to_string(size);
    EXPECT_EQ(Lines(ReadText(base + ".jsonl")), static_cast<size_t>(size));
    std::istringstream in(ReadText(base + ".ids"));
    std::set<std::string> ids;
    for (std::string id; std::getline(in, id);) ids.insert(id);
    EXPECT_EQ(ids.size(), static_cast<size_t>(size));
    EXPECT_TRUE(std::includes(ids.begin(), ids.end(), previous.begin(),
                              previous.end()));
    previous = ids;
  }
  EXPECT_EQ(Cli({"curve-export", "--treebank", kEn, "--sizes", "20,5",
                 "--out", Dir("d")})
                .code,
            kExitConfig);
}

TEST_F(CliTest, ExitCodes) {
  // Missing input file.
  Result r = Cli({"stats", "--treebank", Dir("missing.conllu")});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("cannot open"), std::string::npos);

  // Malformed input data.
  const std::string bad = Write("bad-ud-test.conllu", "1\tx\n\n");
  r = Cli({"stats", "--treebank", bad});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("10 tab-separated"), std::string::npos);

  // Malformed config file.
  const std::string cfg = Write("mock.json", "{\"p_cycle\": 7}");
  r = Cli({"infer", "--treebank", kEn, "--mock", "noisy", "--mock-config", cfg,
           "--out", Dir("o")});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("p_cycle"), std::string::npos);

  // Conflicting flags.
  r = Cli({"infer", "--treebank", kEn, "--mock", "oracle", "--endpoint",
           "http://127.0.0.1:1", "--out", Dir("o")});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("mutually exclusive"), std::string::npos);
  r = Cli({"score", "--treebank", kEn, "--system", kEn, "--completions", kEn});
  EXPECT_EQ(r.code, kExitConfig);
  r = Cli({"infer", "--treebank", kEn, "--p-cycle", "0.5", "--endpoint",
           "http://127.0.0.1:1", "--model", "m", "--out", Dir("o")});
  EXPECT_EQ(r.code, kExitConfig);

  // Flag validation by the parser.
  EXPECT_EQ(Cli({"export-sft", "--treebank", kEn, "--steps", "4", "--out",
                 Dir("o")})
                .code,
            kExitConfig);
  EXPECT_EQ(Cli({"export-sft", "--treebank", kEn}).code, kExitConfig);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(Cli({}).code, kExitConfig);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
  EXPECT_EQ(Cli({"pipeline", "--help"}).code, kExitOk);

  // Unknown language with no name given.
  const std::string odd = Write("qq_x-ud-test.conllu",
                                ReadText(DataPath("example_sentence.conllu")));
  r = Cli({"export-sft", "--treebank", odd, "--out", Dir("o")});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_EQ(Cli({"export-sft", "--treebank", odd, "--lang-name", "Qish",
                 "--out", Dir("o")})
                .code,
            kExitOk);
}

TEST_F(CliTest, EndpointExhaustionStillWritesArtifacts) {
  const std::string out = Dir("e");
  const Result r = Cli({"pipeline", "--treebank", DataPath("example_sentence.conllu"),
                        "--lang", "en", "--endpoint", "http://127.0.0.1:1",
                        "--model", "m", "--max-attempts", "1", "--out", out});
  EXPECT_EQ(r.code, kExitEndpointExhausted);
  EXPECT_EQ(r.out, "0.0\t0.0\t0.0\t0.0\n");
  EXPECT_TRUE(fs::exists(out + "/completions.jsonl"));
  EXPECT_TRUE(fs::exists(out + "/requests.log.jsonl"));
  EXPECT_TRUE(fs::exists(out + "/report.json"));
}

TEST_F(CliTest, LowScoresAreNotErrors) {
  const Result r = Cli({"pipeline", "--treebank", kEn, "--mock", "noisy",
                        "--p-drop-row", "1", "--out", Dir("z")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "0.0\t0.0\t0.0\t0.0\n");
}

}  // namespace
}  // namespace llmdep::cli
