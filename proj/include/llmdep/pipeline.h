#ifndef LLMDEP_PIPELINE_H_
#define LLMDEP_PIPELINE_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "llmdep/decoder.h"
#include "llmdep/llm.h"
#include "llmdep/metrics.h"
#include "llmdep/prompts.h"
#include "llmdep/treebank.h"

namespace llmdep {

// Completion for one gold sentence, in corpus order.
struct CompletionRecord {
  std::string sent_id;
  CompletionResult result;
};

// Builds the prompts of `gold` and completes them with the mock.
std::vector<CompletionRecord> InferWithMock(const Treebank& gold,
                                            const StepPlan& plan,
                                            const LanguageProfile& lang,
                                            const MockPolicy& policy,
                                            size_t max_in_flight = 1);

// Same with a remote client; `max_output_tokens` <= 0 selects
// DefaultMaxOutputTokens per sentence.
std::vector<CompletionRecord> InferWithClient(
    const Treebank& gold, const StepPlan& plan, const LanguageProfile& lang,
    ChatClient& client, const std::string& model_name, size_t max_in_flight,
    int max_output_tokens = 0);

// JSON lines {"sent_id","ok","text","attempts","error"}.
void WriteCompletions(const std::vector<CompletionRecord>& records,
                      std::ostream& out);
// Throws FormatError on malformed lines or repeated sent_ids.
std::vector<CompletionRecord> ReadCompletions(std::istream& in);

struct ScoredCorpus {
  std::vector<Decoded> decoded;  // parallel to gold.sentences
  CorpusCounts counts;
  EvalReport report;

  // Recovered system sentences, for writing as CoNLL-U.
  Treebank SystemTreebank(const Treebank& gold) const;
};

// Decodes and scores completions against gold. Sentences without a record,
// or whose completion failed, are scored as empty output.
ScoredCorpus DecodeAndScore(const Treebank& gold,
                            const std::vector<CompletionRecord>& completions,
                            const StepPlan& plan);

// Scores an already decoded system treebank. Sentences are paired by
// sent_id; missing ones count as empty output. Token recall before recovery
// equals token recall here.
EvalReport ScoreTreebanks(const Treebank& gold, const Treebank& system);

}  // namespace llmdep

#endif  // LLMDEP_PIPELINE_H_
