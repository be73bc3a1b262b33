#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>
#include <json.hpp>

#include "llmdep/decoder.h"
#include "llmdep/errors.h"
#include "llmdep/hash.h"
#include "llmdep/llm.h"
#include "llmdep/metrics.h"
#include "llmdep/pipeline.h"
#include "llmdep/prompts.h"
#include "llmdep/treebank.h"

namespace llmdep::cli {
namespace {

using nlohmann::ordered_json;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Output directory that remembers the hash of everything written into it.
class ArtifactDir {
 public:
  explicit ArtifactDir(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) {
      throw IoError("cannot create output directory '" + dir_ +
                    "': " + ec.message());
    }
  }

  void Write(const std::string& name, std::string_view content) {
    WriteRaw(name, content);
    artifacts_[name] = Sha256Hex(content);
  }

  void WriteManifest(const RunConfig& c, const ordered_json& config) {
    ordered_json m;
    m["command"] = c.command;
    m["seed"] = c.seed;
    m["template_version"] = kTemplateVersion;
    m["config_hash"] = Sha256Hex(config.dump());
    m["config"] = config;
    m["inputs"] = ordered_json::array();
    for (const std::string& path : InputPaths(c)) {
      m["inputs"].push_back({{"path", path}, {"sha256", Sha256File(path)}});
    }
    m["artifacts"] = ordered_json::array();
    for (const auto& [name, sha] : artifacts_) {
      m["artifacts"].push_back({{"name", name}, {"sha256", sha}});
    }
    WriteRaw("manifest.json", m.dump(2) + "\n");
  }

  static std::vector<std::string> InputPaths(const RunConfig& c) {
    std::vector<std::string> paths = c.treebanks;
    for (const std::string* p :
         {&c.include_test, &c.completions, &c.system, &c.mock_config}) {
      if (!p->empty()) paths.push_back(*p);
    }
    return paths;
  }

 private:
  void WriteRaw(const std::string& name, std::string_view content) {
    const std::string path = (std::filesystem::path(dir_) / name).string();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path + "'");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("write failed for '" + path + "'");
  }

  std::string dir_;
  std::map<std::string, std::string> artifacts_;
};

ordered_json ConfigJson(const RunConfig& c, const MockPolicy* policy) {
  ordered_json j;
  j["command"] = c.command;
  j["treebanks"] = c.treebanks;
  if (!c.include_test.empty()) j["include_test"] = c.include_test;
  j["steps"] = c.steps;
  if (!c.lang.empty()) j["lang"] = c.lang;
  if (!c.lang_name.empty()) j["lang_name"] = c.lang_name;
  j["seed"] = c.seed;
  if (!c.sizes.empty()) j["sizes"] = c.sizes;
  if (!c.downsample.empty()) j["downsample"] = c.downsample;
  if (c.count) j["count"] = *c.count;
  if (policy != nullptr) j["mock"] = ordered_json::parse(policy->ToJson());
  if (!c.endpoint.empty()) {
    j["endpoint"] = c.endpoint;
    j["model"] = c.model;
    j["api_key_env"] = c.api_key_env;
    j["max_attempts"] = c.max_attempts;
    j["max_output_tokens"] = c.max_output_tokens;
  }
  if (!c.completions.empty()) j["completions"] = c.completions;
  if (!c.system.empty()) j["system"] = c.system;
  return j;
}

Treebank LoadTreebank(const std::string& path) {
  return ReadConlluFile(path, LanguageCodeFromPath(path), SplitFromPath(path));
}

const std::string& SingleTreebank(const RunConfig& c) {
  if (c.treebanks.size() != 1) {
    throw ConfigError(c.command + " takes exactly one --treebank, got " +
                      std::to_string(c.treebanks.size()));
  }
  return c.treebanks.front();
}

void RequireOut(const RunConfig& c) {
  if (c.out.empty()) throw ConfigError(c.command + " needs --out");
}

LanguageProfile ResolveLanguage(const RunConfig& c, const Treebank& tb) {
  const std::string code = c.lang.empty() ? tb.language_code : c.lang;
  if (!c.lang_name.empty()) return LanguageProfile::Custom(code, c.lang_name);
  if (code.empty()) {
    throw ConfigError(
        "cannot derive the language from the treebank file name; pass --lang");
  }
  return LanguageProfile::ForCode(code);
}

double ParseFraction(std::string_view text, std::string_view what) {
  double value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("bad number '" + std::string(text) + "' in " +
                      std::string(what));
  }
  return value;
}

std::map<std::string, double> ParseDownsample(
    const std::vector<std::string>& specs) {
  std::map<std::string, double> out;
  for (const std::string& spec : specs) {
    const size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--downsample expects code=fraction, got '" + spec +
                        "'");
    }
    const std::string code = spec.substr(0, eq);
    if (out.count(code)) {
      throw ConfigError("--downsample given twice for '" + code + "'");
    }
    out[code] = ParseFraction(std::string_view(spec).substr(eq + 1),
                              "--downsample " + spec);
  }
  return out;
}

bool HasMockOverrides(const RunConfig& c) {
  return !c.mock_config.empty() || c.p_drop_row || c.p_field_count ||
         c.p_head_error || c.p_upos_error || c.p_deprel_error ||
         c.p_multi_root || c.p_cycle || c.p_form_error;
}

MockPolicy ResolvePolicy(const RunConfig& c) {
  MockPolicy p;
  if (!c.mock_config.empty()) p = MockPolicy::FromJson(ReadFile(c.mock_config));
  p.mode = ParseMockMode(c.mock);
  const std::pair<const std::optional<double>*, double MockPolicy::*>
      overrides[] = {
          {&c.p_drop_row, &MockPolicy::p_drop_row},
          {&c.p_field_count, &MockPolicy::p_field_count},
          {&c.p_head_error, &MockPolicy::p_head_error},
          {&c.p_upos_error, &MockPolicy::p_upos_error},
          {&c.p_deprel_error, &MockPolicy::p_deprel_error},
          {&c.p_multi_root, &MockPolicy::p_multi_root},
          {&c.p_cycle, &MockPolicy::p_cycle},
          {&c.p_form_error, &MockPolicy::p_form_error},
      };
  for (const auto& [flag, member] : overrides) {
    if (*flag) p.*member = **flag;
  }
  // One seed drives everything in a run.
  p.seed = c.seed;
  p.Validate();
  return p;
}

void CheckInferenceFlags(const RunConfig& c) {
  if (!c.mock.empty() && !c.endpoint.empty()) {
    throw ConfigError("--mock and --endpoint are mutually exclusive");
  }
  if (c.mock.empty() && c.endpoint.empty()) {
    throw ConfigError(c.command + " needs --mock or --endpoint");
  }
  if (c.mock.empty() && HasMockOverrides(c)) {
    throw ConfigError("--mock-config and --p-* flags need --mock");
  }
  if (!c.endpoint.empty() && c.model.empty()) {
    throw ConfigError("--endpoint needs --model");
  }
  if (c.max_in_flight == 0) throw ConfigError("--max-in-flight must be >= 1");
}

std::string Join(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) out += s + '\n';
  return out;
}

std::string CompletionsJsonl(const std::vector<CompletionRecord>& records) {
  std::ostringstream ss;
  WriteCompletions(records, ss);
  return ss.str();
}

size_t CountFailed(const std::vector<CompletionRecord>& records) {
  size_t failed = 0;
  for (const CompletionRecord& r : records) failed += r.result.ok ? 0 : 1;
  return failed;
}

// Runs inference and writes completions.jsonl (plus the request log for
// remote endpoints).
std::vector<CompletionRecord> Infer(const RunConfig& c, const Treebank& gold,
                                    const StepPlan& plan,
                                    const LanguageProfile& lang,
                                    const MockPolicy* policy,
                                    ArtifactDir& dir) {
  std::vector<CompletionRecord> records;
  if (policy != nullptr) {
    records = InferWithMock(gold, plan, lang, *policy, c.max_in_flight);
  } else {
    const char* key = std::getenv(c.api_key_env.c_str());
    RetryPolicy retry;
    retry.max_attempts = c.max_attempts;
    std::vector<std::string> log_lines;
    RequestLog log([&log_lines](const std::string& line) {
      log_lines.push_back(line);
    });
    HttpChatClient client(ParseEndpoint(c.endpoint), key ? key : "", retry, {},
                          &log);
    records = InferWithClient(gold, plan, lang, client, c.model,
                              c.max_in_flight, c.max_output_tokens);
    // Requests finish in any order; sorting keeps the log stable.
    std::sort(log_lines.begin(), log_lines.end());
    dir.Write("requests.log.jsonl", Join(log_lines));
  }
  dir.Write("completions.jsonl", CompletionsJsonl(records));
  return records;
}

void WriteDecodeArtifacts(const Treebank& gold, const ScoredCorpus& scored,
                          ArtifactDir& dir) {
  dir.Write("recovered.conllu", WriteConlluString(scored.SystemTreebank(gold)));
  std::string tsv = std::string(ValidityTsvHeader()) + '\n';
  std::string jsonl;
  for (size_t i = 0; i < gold.sentences.size(); ++i) {
    const std::string& id = gold.sentences[i].sent_id;
    const ValidityReport& v = scored.decoded[i].system.validity;
    tsv += ValidityTsvRow(id, v) + '\n';
    jsonl += ValidityJson(id, v) + '\n';
  }
  dir.Write("validity.tsv", tsv);
  dir.Write("validity.jsonl", jsonl);
}

void WriteReport(const EvalReport& report, ArtifactDir& dir) {
  dir.Write("report.json", ReportJson(report) + "\n");
  dir.Write("report.tsv", std::string(ReportTsvHeader()) + '\n' +
                              ReportLine(report) + '\n');
}

void PrintReport(const RunConfig& c, const EvalReport& report,
                 std::ostream& out) {
  out << (c.json ? ReportJson(report) : ReportLine(report)) << '\n';
}

int ReportExhausted(size_t failed, std::ostream& err) {
  if (failed == 0) return kExitOk;
  err << "error: " << failed
      << " sentence(s) exhausted their retries against the endpoint\n";
  return kExitEndpointExhausted;
}

int RunStats(const RunConfig& c, std::ostream& out) {
  if (c.treebanks.empty()) throw ConfigError("stats needs --treebank");
  std::string body;
  if (c.treebanks.size() == 1) {
    const CorpusStats stats = ComputeStats(LoadTreebank(c.treebanks.front()));
    body = c.json ? StatsJson(stats) + "\n" : StatsTsv(stats);
  } else {
    body = "treebank\tsplit\tn_sentences\tn_tokens\n";
    CorpusStats total;
    for (const std::string& path : c.treebanks) {
      const Treebank tb = LoadTreebank(path);
      const CorpusStats s = ComputeStats(tb);
      body += tb.language_code + '\t' + std::string(SplitName(tb.split)) +
              '\t' + std::to_string(s.n_sentences) + '\t' +
              std::to_string(s.n_tokens) + '\n';
      total.n_sentences += s.n_sentences;
      total.n_tokens += s.n_tokens;
    }
    body += "total\t-\t" + std::to_string(total.n_sentences) + '\t' +
            std::to_string(total.n_tokens) + '\n';
  }
  out << body;
  if (!c.out.empty()) {
    ArtifactDir dir(c.out);
    dir.Write(c.json && c.treebanks.size() == 1 ? "stats.json" : "stats.tsv",
              body);
    dir.WriteManifest(c, ConfigJson(c, nullptr));
  }
  return kExitOk;
}

int RunExportSft(const RunConfig& c, std::ostream& out) {
  RequireOut(c);
  const Treebank train = LoadTreebank(SingleTreebank(c));
  const StepPlan plan = StepPlan::FromSteps(c.steps);
  const LanguageProfile lang = ResolveLanguage(c, train);
  std::optional<Treebank> test;
  if (!c.include_test.empty()) test = LoadTreebank(c.include_test);

  std::ostringstream jsonl;
  const size_t n = ExportSft(train, plan, lang, test ? &*test : nullptr, jsonl);
  ArtifactDir dir(c.out);
  dir.Write("sft.jsonl", jsonl.str());
  dir.WriteManifest(c, ConfigJson(c, nullptr));
  out << "records\t" << n << '\n';
  return kExitOk;
}

int RunMix(const RunConfig& c, std::ostream& out) {
  RequireOut(c);
  if (c.treebanks.empty()) throw ConfigError("mix needs --treebank");
  std::vector<Treebank> parts;
  for (const std::string& path : c.treebanks) {
    parts.push_back(LoadTreebank(path));
    if (parts.back().language_code.empty()) {
      throw ConfigError("cannot derive a language code from '" + path + "'");
    }
  }
  const StepPlan plan = StepPlan::FromSteps(c.steps);
  const MixedTreebank mixed =
      MixMultilingual(parts, ParseDownsample(c.downsample), c.seed);

  std::string provenance = "language\tavailable\tkept\tkept_tokens\n";
  for (const PartProvenance& p : mixed.provenance) {
    provenance += p.language_code + '\t' + std::to_string(p.available) + '\t' +
                  std::to_string(p.kept) + '\t' +
                  std::to_string(p.kept_tokens) + '\n';
  }

  std::map<std::string, LanguageProfile> profiles;
  std::ostringstream jsonl;
  SftWriter writer(jsonl);
  for (size_t i = 0; i < mixed.treebank.sentences.size(); ++i) {
    const std::string& code = mixed.sentence_languages[i];
    auto it = profiles.find(code);
    if (it == profiles.end()) {
      it = profiles.emplace(code, LanguageProfile::ForCode(code)).first;
    }
    writer.Write(BuildPrompt(mixed.treebank.sentences[i], plan, it->second));
  }

  ArtifactDir dir(c.out);
  dir.Write("mixed.conllu", WriteConlluString(mixed.treebank));
  dir.Write("provenance.tsv", provenance);
  dir.Write("sft.jsonl", jsonl.str());
  dir.WriteManifest(c, ConfigJson(c, nullptr));
  out << StatsTsv(ComputeStats(mixed.treebank));
  return kExitOk;
}

int RunSubsample(const RunConfig& c, std::ostream& out) {
  RequireOut(c);
  if (!c.count) throw ConfigError("subsample needs --count");
  const Treebank sample =
      Subsample(LoadTreebank(SingleTreebank(c)), *c.count, c.seed);
  ArtifactDir dir(c.out);
  dir.Write("subsample.conllu", WriteConlluString(sample));
  dir.WriteManifest(c, ConfigJson(c, nullptr));
  out << StatsTsv(ComputeStats(sample));
  return kExitOk;
}

int RunCurveExport(const RunConfig& c, std::ostream& out) {
  RequireOut(c);
  if (c.sizes.empty()) throw ConfigError("curve-export needs --sizes");
  const Treebank tb = LoadTreebank(SingleTreebank(c));
  const StepPlan plan = StepPlan::FromSteps(c.steps);
  const std::vector<LadderFile> ladder =
      ExportCurveLadder(tb, c.sizes, c.seed, plan, ResolveLanguage(c, tb));

  ArtifactDir dir(c.out);
  std::string table = "size\tfile\trecords\n";
  for (const LadderFile& f : ladder) {
    dir.Write(f.name, f.jsonl);
    dir.Write("sft_n" + std::to_string(f.size) + ".ids", Join(f.sent_ids));
    table += std::to_string(f.size) + '\t' + f.name + '\t' +
             std::to_string(f.sent_ids.size()) + '\n';
  }
  dir.Write("ladder.tsv", table);
  dir.WriteManifest(c, ConfigJson(c, nullptr));
  out << table;
  return kExitOk;
}

int RunInfer(const RunConfig& c, std::ostream& out, std::ostream& err) {
  RequireOut(c);
  CheckInferenceFlags(c);
  const Treebank gold = LoadTreebank(SingleTreebank(c));
  const StepPlan plan = StepPlan::FromSteps(c.steps);
  const LanguageProfile lang = ResolveLanguage(c, gold);
  std::optional<MockPolicy> policy;
  if (!c.mock.empty()) policy = ResolvePolicy(c);

  ArtifactDir dir(c.out);
  const auto records = Infer(c, gold, plan, lang, policy ? &*policy : nullptr,
                             dir);
  dir.WriteManifest(c, ConfigJson(c, policy ? &*policy : nullptr));
  const size_t failed = CountFailed(records);
  out << "completions\t" << records.size() << "\nfailed\t" << failed << '\n';
  return ReportExhausted(failed, err);
}

std::vector<CompletionRecord> LoadCompletions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return ReadCompletions(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

int RunDecode(const RunConfig& c, std::ostream& out) {
  RequireOut(c);
  if (c.completions.empty()) throw ConfigError("decode needs --completions");
  const Treebank gold = LoadTreebank(SingleTreebank(c));
  const ScoredCorpus scored = DecodeAndScore(
      gold, LoadCompletions(c.completions), StepPlan::FromSteps(c.steps));
  ArtifactDir dir(c.out);
  WriteDecodeArtifacts(gold, scored, dir);
  dir.WriteManifest(c, ConfigJson(c, nullptr));
  out << "sentences\t" << scored.report.validity.sentences << "\nclean\t"
      << scored.report.validity.clean << '\n';
  return kExitOk;
}

int RunScore(const RunConfig& c, std::ostream& out) {
  if (c.system.empty() == c.completions.empty()) {
    throw ConfigError("score needs exactly one of --system or --completions");
  }
  const Treebank gold = LoadTreebank(SingleTreebank(c));
  EvalReport report;
  if (!c.system.empty()) {
    ConlluReadOptions lenient;
    lenient.lenient = true;
    const Treebank system =
        ReadConlluFile(c.system, gold.language_code, gold.split, lenient);
    report = ScoreTreebanks(gold, system);
  } else {
    report = DecodeAndScore(gold, LoadCompletions(c.completions),
                            StepPlan::FromSteps(c.steps))
                 .report;
  }
  PrintReport(c, report, out);
  if (!c.out.empty()) {
    ArtifactDir dir(c.out);
    WriteReport(report, dir);
    dir.WriteManifest(c, ConfigJson(c, nullptr));
  }
  return kExitOk;
}

int RunPipeline(const RunConfig& c, std::ostream& out, std::ostream& err) {
  RequireOut(c);
  CheckInferenceFlags(c);
  const Treebank gold = LoadTreebank(SingleTreebank(c));
  const StepPlan plan = StepPlan::FromSteps(c.steps);
  const LanguageProfile lang = ResolveLanguage(c, gold);
  std::optional<MockPolicy> policy;
  if (!c.mock.empty()) policy = ResolvePolicy(c);

  ArtifactDir dir(c.out);
  std::ostringstream sft;
  ExportSft(gold, plan, lang, nullptr, sft);
  dir.Write("sft.jsonl", sft.str());
  const auto records = Infer(c, gold, plan, lang, policy ? &*policy : nullptr,
                             dir);
  const ScoredCorpus scored = DecodeAndScore(gold, records, plan);
  WriteDecodeArtifacts(gold, scored, dir);
  WriteReport(scored.report, dir);
  dir.WriteManifest(c, ConfigJson(c, policy ? &*policy : nullptr));
  PrintReport(c, scored.report, out);
  return ReportExhausted(CountFailed(records), err);
}

void AddProbability(CLI::App* sub, const std::string& name,
                    std::optional<double>& target,
                    std::vector<std::function<void()>>& finalizers) {
  auto value = std::make_shared<double>(0.0);
  CLI::Option* opt = sub->add_option("--" + name, *value,
                                     "Mock error probability")
                         ->check(CLI::Range(0.0, 1.0));
  finalizers.push_back([opt, value, &target] {
    if (opt->count() > 0) target = *value;
  });
}

}  // namespace

int Run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.command == "stats") return RunStats(c, out);
  if (c.command == "export-sft") return RunExportSft(c, out);
  if (c.command == "mix") return RunMix(c, out);
  if (c.command == "subsample") return RunSubsample(c, out);
  if (c.command == "curve-export") return RunCurveExport(c, out);
  if (c.command == "infer") return RunInfer(c, out, err);
  if (c.command == "decode") return RunDecode(c, out);
  if (c.command == "score") return RunScore(c, out);
  if (c.command == "pipeline") return RunPipeline(c, out, err);
  throw ConfigError("unknown command '" + c.command + "'");
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  RunConfig c;
  CLI::App app("Dependency parsing with chat LLMs: data, prompts, scoring",
               "llmdep");
  app.require_subcommand(1);
  std::vector<std::function<void()>> finalizers;
  size_t count = 0;
  CLI::Option* count_opt = nullptr;

  auto add_base = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--treebank", c.treebanks, "CoNLL-U file")->required();
    sub->add_option("--seed", c.seed, "Top-level random seed")
        ->capture_default_str();
    auto* o = sub->add_option("--out", c.out, "Output directory");
    if (needs_out) o->required();
  };
  auto add_steps = [&](CLI::App* sub) {
    sub->add_option("--steps", c.steps, "Step plan: 1, 2 or 3")
        ->check(CLI::IsMember({1, 2, 3}))
        ->capture_default_str();
  };
  auto add_lang = [&](CLI::App* sub) {
    sub->add_option("--lang", c.lang,
                    "Language code (default: from the treebank file name)");
    sub->add_option("--lang-name", c.lang_name,
                    "Language name used in prompts");
  };
  auto add_inference = [&](CLI::App* sub) {
    sub->add_option("--mock", c.mock, "Mock model: oracle or noisy")
        ->check(CLI::IsMember({"oracle", "noisy"}));
    sub->add_option("--mock-config", c.mock_config, "Mock policy JSON file");
    AddProbability(sub, "p-drop-row", c.p_drop_row, finalizers);
    AddProbability(sub, "p-field-count", c.p_field_count, finalizers);
    AddProbability(sub, "p-head-error", c.p_head_error, finalizers);
    AddProbability(sub, "p-upos-error", c.p_upos_error, finalizers);
    AddProbability(sub, "p-deprel-error", c.p_deprel_error, finalizers);
    AddProbability(sub, "p-multi-root", c.p_multi_root, finalizers);
    AddProbability(sub, "p-cycle", c.p_cycle, finalizers);
    AddProbability(sub, "p-form-error", c.p_form_error, finalizers);
    sub->add_option("--endpoint", c.endpoint,
                    "OpenAI-compatible base URL, e.g. http://localhost:8000/v1");
    sub->add_option("--model", c.model, "Model name sent to the endpoint");
    sub->add_option("--api-key-env", c.api_key_env,
                    "Environment variable holding the API key")
        ->capture_default_str();
    sub->add_option("--max-attempts", c.max_attempts, "Attempts per sentence")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--max-tokens", c.max_output_tokens,
                    "Output token budget (0: derived from sentence length)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--max-in-flight", c.max_in_flight,
                    "Concurrent requests")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  CLI::App* stats = app.add_subcommand("stats", "Sentence and token counts");
  add_base(stats, false);
  stats->add_flag("--json", c.json, "Print JSON");

  CLI::App* sft = app.add_subcommand("export-sft", "Write SFT chat JSONL");
  add_base(sft, true);
  add_steps(sft);
  add_lang(sft);
  sft->add_option("--include-test", c.include_test,
                  "Append this test treebank to the SFT records");

  CLI::App* mix =
      app.add_subcommand("mix", "Mix treebanks into one multilingual corpus");
  add_base(mix, true);
  add_steps(mix);
  mix->add_option("--downsample", c.downsample,
                  "Kept fraction per language, code=fraction")
      ->delimiter(',');

  CLI::App* sub = app.add_subcommand("subsample", "Seeded sentence subsample");
  add_base(sub, true);
  count_opt = sub->add_option("-n,--count", count, "Sentences to keep")
                  ->required();

  CLI::App* curve =
      app.add_subcommand("curve-export", "Nested learning-curve SFT files");
  add_base(curve, true);
  add_steps(curve);
  add_lang(curve);
  curve->add_option("--sizes", c.sizes, "Ascending sizes, comma-separated")
      ->delimiter(',')
      ->required();

  CLI::App* infer = app.add_subcommand("infer", "Collect model completions");
  add_base(infer, true);
  add_steps(infer);
  add_lang(infer);
  add_inference(infer);

  CLI::App* decode =
      app.add_subcommand("decode", "Recover and validate saved completions");
  add_base(decode, true);
  add_steps(decode);
  decode->add_option("--completions", c.completions, "completions.jsonl")
      ->required();

  CLI::App* score = app.add_subcommand("score", "Score against gold");
  add_base(score, false);
  add_steps(score);
  score->add_option("--system", c.system, "System CoNLL-U file");
  score->add_option("--completions", c.completions, "completions.jsonl");
  score->add_flag("--json", c.json, "Print the JSON report");

  CLI::App* pipeline =
      app.add_subcommand("pipeline", "infer, decode and score in one run");
  add_base(pipeline, true);
  add_steps(pipeline);
  add_lang(pipeline);
  add_inference(pipeline);
  pipeline->add_flag("--json", c.json, "Print the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const auto subs = app.get_subcommands();
    if (!subs.empty()) err << "run 'llmdep " << subs.front()->get_name()
                           << " --help' for usage\n";
    return kExitConfig;
  }
  for (const auto& f : finalizers) f();
  if (count_opt->count() > 0) c.count = count;
  c.command = app.get_subcommands().front()->get_name();

  try {
    return Run(c, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace llmdep::cli
