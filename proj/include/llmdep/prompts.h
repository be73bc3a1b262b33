#ifndef LLMDEP_PROMPTS_H_
#define LLMDEP_PROMPTS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "llmdep/treebank.h"

namespace llmdep {

// Version tag of the built-in prompt templates.
inline constexpr std::string_view kTemplateVersion = "v1";

enum class Field { kUpos, kHead, kDeprel };

// How the UPOS, HEAD and DEPREL fields are split into ordered tasks:
//   1 step:  [UPOS HEAD DEPREL]
//   2 steps: [UPOS] [HEAD DEPREL]
//   3 steps: [UPOS] [HEAD] [DEPREL]
class StepPlan {
 public:
  // Throws ConfigError unless steps is 1, 2 or 3.
  static StepPlan FromSteps(int steps);

  int steps() const { return static_cast<int>(groups_.size()); }
  const std::vector<std::vector<Field>>& groups() const { return groups_; }
  // TSV width of each task block, counting ID and FORM.
  std::vector<size_t> BlockWidths() const;

 private:
  explicit StepPlan(std::vector<std::vector<Field>> groups)
      : groups_(std::move(groups)) {}

  std::vector<std::vector<Field>> groups_;
};

struct LanguageProfile {
  std::string language_code;
  std::string language_name;

  // Looks up the display name from the part of the code before '_'
  // ("en_ewt" -> "English"). Throws ConfigError for unknown languages.
  static LanguageProfile ForCode(std::string_view language_code);
  // Throws ConfigError if name is empty.
  static LanguageProfile Custom(std::string language_code, std::string name);
};

struct PromptBundle {
  std::string system;
  std::string user;
  std::string gold_assistant;
  std::string sent_id;
  size_t n_words = 0;
};

// Rows of an assistant reply: ID, FORM, UPOS, HEAD, DEPREL. A task block
// prints the first BlockWidths()[k] fields of each row, or fewer if the row
// is shorter.
using ReplyRow = std::vector<std::string>;

std::vector<ReplyRow> GoldRows(const Sentence& sentence);
// Task blocks headed "- Task k" for multi-step plans, a bare TSV for 1 step.
std::string RenderAssistant(const std::vector<ReplyRow>& rows,
                            const StepPlan& plan);

// Throws FormatError for an empty sentence.
PromptBundle BuildPrompt(const Sentence& sentence, const StepPlan& plan,
                         const LanguageProfile& lang);

// "[system]\n...\n\n[user]\n...\n\n[assistant]\n...\n", the layout of the
// golden prompt files.
std::string RenderBundle(const PromptBundle& bundle);

// One chat fine-tuning record:
// {"messages":[{"role":"system","content":...},{"role":"user",...},
//              {"role":"assistant",...}]}
std::string SftRecordJson(const PromptBundle& bundle);

// Writes one JSON line per bundle.
class SftWriter {
 public:
  explicit SftWriter(std::ostream& out) : out_(out) {}

  void Write(const PromptBundle& bundle);
  size_t records() const { return records_; }

 private:
  std::ostream& out_;
  size_t records_ = 0;
};

// Writes the SFT file for `train`, followed by `include_test` when given.
// Returns the number of records. Throws IoError if the stream fails.
size_t ExportSft(const Treebank& train, const StepPlan& plan,
                 const LanguageProfile& lang, const Treebank* include_test,
                 std::ostream& out);

struct LadderFile {
  size_t size = 0;
  std::string name;
  std::vector<std::string> sent_ids;
  std::string jsonl;
};

// One SFT file per size. All sizes draw prefixes of the same SamplingOrder,
// so each sample contains every smaller one. Throws ConfigError if sizes are
// not strictly ascending or exceed the corpus.
std::vector<LadderFile> ExportCurveLadder(const Treebank& treebank,
                                          const std::vector<size_t>& sizes,
                                          uint64_t seed, const StepPlan& plan,
                                          const LanguageProfile& lang);

}  // namespace llmdep

#endif  // LLMDEP_PROMPTS_H_
