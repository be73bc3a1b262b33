#include "llmdep/prompts.h"

#include <algorithm>
#include <array>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "llmdep/errors.h"
#include <json.hpp>
#include "prompt_templates.h"
#include "text_util.h"

namespace llmdep {
namespace {

struct LanguageName {
  std::string_view prefix;
  std::string_view name;
};

constexpr std::array kLanguageNames = {
    LanguageName{"ar", "Arabic"},     LanguageName{"bg", "Bulgarian"},
    LanguageName{"ca", "Catalan"},    LanguageName{"cs", "Czech"},
    LanguageName{"da", "Danish"},     LanguageName{"de", "German"},
    LanguageName{"el", "Greek"},      LanguageName{"en", "English"},
    LanguageName{"es", "Spanish"},    LanguageName{"et", "Estonian"},
    LanguageName{"fa", "Persian"},    LanguageName{"fi", "Finnish"},
    LanguageName{"fr", "French"},     LanguageName{"he", "Hebrew"},
    LanguageName{"hi", "Hindi"},      LanguageName{"hu", "Hungarian"},
    LanguageName{"id", "Indonesian"}, LanguageName{"it", "Italian"},
    LanguageName{"ja", "Japanese"},   LanguageName{"ko", "Korean"},
    LanguageName{"lv", "Latvian"},    LanguageName{"nl", "Dutch"},
    LanguageName{"no", "Norwegian"},  LanguageName{"pl", "Polish"},
    LanguageName{"pt", "Portuguese"}, LanguageName{"ro", "Romanian"},
    LanguageName{"ru", "Russian"},    LanguageName{"sk", "Slovak"},
    LanguageName{"sl", "Slovenian"},  LanguageName{"sv", "Swedish"},
    LanguageName{"tr", "Turkish"},    LanguageName{"uk", "Ukrainian"},
    LanguageName{"vi", "Vietnamese"}, LanguageName{"zh", "Chinese"},
};

std::string_view Article(std::string_view name) {
  constexpr std::string_view kVowels = "AEIOUaeiou";
  return kVowels.find(name.front()) != std::string_view::npos ? "an" : "a";
}

std::string_view UserTemplate(int steps) {
  switch (steps) {
    case 1:
      return templates::v1::kOneStepUser;
    case 2:
      return templates::v1::kTwoStepUser;
    default:
      return templates::v1::kThreeStepUser;
  }
}

std::string JoinRow(const ReplyRow& row, size_t width) {
  std::string line;
  const size_t n = std::min(width, row.size());
  for (size_t i = 0; i < n; ++i) {
    if (i > 0) line += '\t';
    line += row[i];
  }
  return line;
}

}  // namespace

StepPlan StepPlan::FromSteps(int steps) {
  switch (steps) {
    case 1:
      return StepPlan({{Field::kUpos, Field::kHead, Field::kDeprel}});
    case 2:
      return StepPlan({{Field::kUpos}, {Field::kHead, Field::kDeprel}});
    case 3:
      return StepPlan({{Field::kUpos}, {Field::kHead}, {Field::kDeprel}});
    default:
      throw ConfigError("step plan must be 1, 2 or 3, got " +
                        std::to_string(steps));
  }
}

std::vector<size_t> StepPlan::BlockWidths() const {
  std::vector<size_t> widths;
  size_t width = 2;
  for (const auto& group : groups_) {
    width += group.size();
    widths.push_back(width);
  }
  return widths;
}

LanguageProfile LanguageProfile::ForCode(std::string_view language_code) {
  const std::string_view prefix =
      language_code.substr(0, language_code.find('_'));
  for (const LanguageName& entry : kLanguageNames) {
    if (entry.prefix == prefix) {
      return {std::string(language_code), std::string(entry.name)};
    }
  }
  throw ConfigError("no language name known for '" +
                    std::string(language_code) + "'; pass one explicitly");
}

LanguageProfile LanguageProfile::Custom(std::string language_code,
                                        std::string name) {
  if (name.empty()) throw ConfigError("language name must not be empty");
  return {std::move(language_code), std::move(name)};
}

std::vector<ReplyRow> GoldRows(const Sentence& sentence) {
  std::vector<ReplyRow> rows;
  rows.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens) {
    rows.push_back({std::to_string(t.id), t.form, t.upos,
                    std::to_string(t.head), t.deprel});
  }
  return rows;
}

std::string RenderAssistant(const std::vector<ReplyRow>& rows,
                            const StepPlan& plan) {
  const std::vector<size_t> widths = plan.BlockWidths();
  std::string out;
  for (size_t k = 0; k < widths.size(); ++k) {
    if (plan.steps() > 1) {
      if (k > 0) out += "\n\n";
      out += "- Task " + std::to_string(k + 1);
      if (!rows.empty()) out += '\n';
    }
    for (size_t r = 0; r < rows.size(); ++r) {
      if (r > 0) out += '\n';
      out += JoinRow(rows[r], widths[k]);
    }
  }
  return out;
}

PromptBundle BuildPrompt(const Sentence& sentence, const StepPlan& plan,
                         const LanguageProfile& lang) {
  if (sentence.tokens.empty()) {
    throw FormatError("cannot build a prompt for empty sentence '" +
                      sentence.sent_id + "'");
  }
  std::string words;
  for (const Token& t : sentence.tokens) {
    if (!words.empty()) words += '\n';
    words += t.form;
  }
  const std::string n = std::to_string(sentence.tokens.size());
  const std::string text = sentence.Text();
  const std::vector<std::pair<std::string_view, std::string_view>> values = {
      {"article", Article(lang.language_name)},
      {"language", lang.language_name},
      {"n", n},
      {"sentence", text},
      {"words", words},
  };
  PromptBundle bundle;
  bundle.system = Substitute(templates::v1::kSystem, values);
  bundle.user = Substitute(UserTemplate(plan.steps()), values);
  bundle.gold_assistant = RenderAssistant(GoldRows(sentence), plan);
  bundle.sent_id = sentence.sent_id;
  bundle.n_words = sentence.tokens.size();
  return bundle;
}

std::string RenderBundle(const PromptBundle& bundle) {
  return "[system]\n" + bundle.system + "\n\n[user]\n" + bundle.user +
         "\n\n[assistant]\n" + bundle.gold_assistant + "\n";
}

std::string SftRecordJson(const PromptBundle& bundle) {
  nlohmann::ordered_json messages = nlohmann::ordered_json::array();
  for (const auto& [role, content] :
       {std::pair<const char*, const std::string*>{"system", &bundle.system},
        {"user", &bundle.user},
        {"assistant", &bundle.gold_assistant}}) {
    nlohmann::ordered_json m;
    m["role"] = role;
    m["content"] = *content;
    messages.push_back(std::move(m));
  }
  nlohmann::ordered_json record;
  record["messages"] = std::move(messages);
  return record.dump(-1, ' ', false,
                     nlohmann::ordered_json::error_handler_t::replace);
}

void SftWriter::Write(const PromptBundle& bundle) {
  out_ << SftRecordJson(bundle) << '\n';
  if (!out_) throw IoError("failed writing SFT record " + bundle.sent_id);
  ++records_;
}

size_t ExportSft(const Treebank& train, const StepPlan& plan,
                 const LanguageProfile& lang, const Treebank* include_test,
                 std::ostream& out) {
  SftWriter writer(out);
  for (const Sentence& s : train.sentences) {
    writer.Write(BuildPrompt(s, plan, lang));
  }
  if (include_test != nullptr) {
    for (const Sentence& s : include_test->sentences) {
      writer.Write(BuildPrompt(s, plan, lang));
    }
  }
  out.flush();
  if (!out) throw IoError("failed flushing SFT output");
  return writer.records();
}

std::vector<LadderFile> ExportCurveLadder(const Treebank& treebank,
                                          const std::vector<size_t>& sizes,
                                          uint64_t seed, const StepPlan& plan,
                                          const LanguageProfile& lang) {
  const size_t corpus = treebank.sentences.size();
  for (size_t i = 0; i < sizes.size(); ++i) {
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw ConfigError("ladder sizes must be strictly ascending");
    }
    if (sizes[i] > corpus) {
      throw ConfigError("ladder size " + std::to_string(sizes[i]) +
                        " exceeds the corpus of " + std::to_string(corpus));
    }
  }
  const std::vector<size_t> order = SamplingOrder(corpus, seed);
  std::vector<LadderFile> files;
  for (size_t size : sizes) {
    std::vector<size_t> chosen(order.begin(), order.begin() + size);
    std::sort(chosen.begin(), chosen.end());
    LadderFile file;
    file.size = size;
    file.name = "sft_n" + std::to_string(size) + ".jsonl";
    std::ostringstream out;
    SftWriter writer(out);
    for (size_t i : chosen) {
      const Sentence& s = treebank.sentences[i];
      file.sent_ids.push_back(s.sent_id);
      writer.Write(BuildPrompt(s, plan, lang));
    }
    file.jsonl = out.str();
    files.push_back(std::move(file));
  }
  return files;
}

}  // namespace llmdep
