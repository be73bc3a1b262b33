#include "llmdep/pipeline.h"

#include <istream>
#include <ostream>
#include <unordered_map>

#include "llmdep/errors.h"
#include <json.hpp>

namespace llmdep {

std::vector<CompletionRecord> InferWithMock(const Treebank& gold,
                                            const StepPlan& plan,
                                            const LanguageProfile& lang,
                                            const MockPolicy& policy,
                                            size_t max_in_flight) {
  policy.Validate();
  auto results = RunBounded(
      gold.sentences.size(), max_in_flight, [&](size_t i) {
        const Sentence& s = gold.sentences[i];
        CompletionResult r;
        r.text = MockComplete(BuildPrompt(s, plan, lang), s, plan, policy);
        r.ok = true;
        r.attempts.push_back({1, 200, ""});
        return r;
      });
  std::vector<CompletionRecord> records;
  records.reserve(results.size());
  for (size_t i = 0; i < results.size(); ++i) {
    records.push_back({gold.sentences[i].sent_id, std::move(results[i])});
  }
  return records;
}

std::vector<CompletionRecord> InferWithClient(
    const Treebank& gold, const StepPlan& plan, const LanguageProfile& lang,
    ChatClient& client, const std::string& model_name, size_t max_in_flight,
    int max_output_tokens) {
  auto results = RunBounded(
      gold.sentences.size(), max_in_flight, [&](size_t i) {
        const Sentence& s = gold.sentences[i];
        const int budget = max_output_tokens > 0
                               ? max_output_tokens
                               : DefaultMaxOutputTokens(s.size(), plan.steps());
        return client.Complete(
            MakeChatRequest(BuildPrompt(s, plan, lang), model_name, budget),
            s.sent_id);
      });
  std::vector<CompletionRecord> records;
  records.reserve(results.size());
  for (size_t i = 0; i < results.size(); ++i) {
    records.push_back({gold.sentences[i].sent_id, std::move(results[i])});
  }
  return records;
}

void WriteCompletions(const std::vector<CompletionRecord>& records,
                      std::ostream& out) {
  for (const CompletionRecord& rec : records) {
    nlohmann::ordered_json j;
    j["sent_id"] = rec.sent_id;
    j["ok"] = rec.result.ok;
    j["text"] = rec.result.text;
    j["attempts"] = rec.result.attempts.size();
    j["error"] = rec.result.error;
    out << j.dump(-1, ' ', false,
                  nlohmann::ordered_json::error_handler_t::replace)
        << '\n';
  }
  if (!out) throw IoError("failed writing completions");
}

std::vector<CompletionRecord> ReadCompletions(std::istream& in) {
  std::vector<CompletionRecord> records;
  std::unordered_map<std::string, size_t> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("sent_id") ||
        !j["sent_id"].is_string()) {
      throw FormatError("completions line " + std::to_string(line_no) +
                        ": expected an object with a sent_id");
    }
    CompletionRecord rec;
    rec.sent_id = j["sent_id"].get<std::string>();
    int attempts = 1;
    try {
      rec.result.ok = j.value("ok", true);
      rec.result.text = j.value("text", "");
      rec.result.error = j.value("error", "");
      attempts = j.value("attempts", 1);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("completions line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    for (int a = 1; a <= attempts; ++a) rec.result.attempts.push_back({a, 0, ""});
    if (!seen.emplace(rec.sent_id, records.size()).second) {
      throw FormatError("completions line " + std::to_string(line_no) +
                        ": repeated sent_id '" + rec.sent_id + "'");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

Treebank ScoredCorpus::SystemTreebank(const Treebank& gold) const {
  Treebank out;
  out.language_code = gold.language_code;
  out.split = gold.split;
  for (const Decoded& d : decoded) {
    if (!d.system.sentence.tokens.empty()) {
      out.sentences.push_back(d.system.sentence);
    }
  }
  return out;
}

ScoredCorpus DecodeAndScore(const Treebank& gold,
                            const std::vector<CompletionRecord>& completions,
                            const StepPlan& plan) {
  std::unordered_map<std::string_view, const CompletionRecord*> by_id;
  for (const CompletionRecord& rec : completions) by_id[rec.sent_id] = &rec;
  ScoredCorpus scored;
  scored.decoded.reserve(gold.sentences.size());
  for (const Sentence& s : gold.sentences) {
    auto it = by_id.find(s.sent_id);
    const std::string_view text =
        it != by_id.end() && it->second->result.ok ? it->second->result.text
                                                   : std::string_view();
    scored.decoded.push_back(DecodeCompletion(text, s, plan));
    scored.counts += ScoreDecoded(s, scored.decoded.back());
  }
  scored.report = Aggregate(scored.counts);
  return scored;
}

EvalReport ScoreTreebanks(const Treebank& gold, const Treebank& system) {
  std::unordered_map<std::string_view, const Sentence*> by_id;
  for (const Sentence& s : system.sentences) by_id[s.sent_id] = &s;
  const Sentence empty;
  CorpusCounts counts;
  for (const Sentence& g : gold.sentences) {
    auto it = by_id.find(g.sent_id);
    const Sentence& sys = it == by_id.end() ? empty : *it->second;
    CorpusCounts c;
    c.recovered = ScoreSentence(g, sys, Align(g, sys));
    c.raw_tokens = c.recovered.tokens;
    const ValidityReport v = CheckValidity(sys);
    c.validity.Add(v);
    counts += c;
  }
  return Aggregate(counts);
}

}  // namespace llmdep
