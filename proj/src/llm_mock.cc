#include <algorithm>

#include "llmdep/errors.h"
#include "llmdep/llm.h"
#include "llmdep/random.h"
#include <json.hpp>

namespace llmdep {
namespace {

struct ProbabilityField {
  const char* name;
  double MockPolicy::*member;
};

constexpr ProbabilityField kProbabilities[] = {
    {"p_drop_row", &MockPolicy::p_drop_row},
    {"p_field_count", &MockPolicy::p_field_count},
    {"p_head_error", &MockPolicy::p_head_error},
    {"p_upos_error", &MockPolicy::p_upos_error},
    {"p_deprel_error", &MockPolicy::p_deprel_error},
    {"p_multi_root", &MockPolicy::p_multi_root},
    {"p_cycle", &MockPolicy::p_cycle},
    {"p_form_error", &MockPolicy::p_form_error},
};

const std::string& OtherThan(const std::vector<std::string>& pool,
                             const std::string& current, Rng& rng) {
  const auto it = std::find(pool.begin(), pool.end(), current);
  if (it == pool.end()) return pool[rng.Below(pool.size())];
  const auto skip = static_cast<size_t>(it - pool.begin());
  size_t k = rng.Below(pool.size() - 1);
  if (k >= skip) ++k;
  return pool[k];
}

std::string DropLastCharacter(std::string form) {
  size_t cut = form.size();
  while (cut > 0 &&
         (static_cast<unsigned char>(form[cut - 1]) & 0xC0) == 0x80) {
    --cut;
  }
  if (cut > 0) --cut;
  form.resize(cut);
  return form.empty() ? "?" : form;
}

}  // namespace

const std::vector<std::string>& UposTags() {
  static const std::vector<std::string> tags = {
      "ADJ", "ADP",  "ADV",  "AUX",   "CCONJ", "DET",  "INTJ", "NOUN", "NUM",
      "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};
  return tags;
}

const std::vector<std::string>& UniversalRelations() {
  static const std::vector<std::string> rels = {
      "acl",       "advcl",  "advmod",     "amod",     "appos",   "aux",
      "case",      "cc",     "ccomp",      "clf",      "compound", "conj",
      "cop",       "csubj",  "dep",        "det",      "discourse",
      "dislocated", "expl",  "fixed",      "flat",     "goeswith", "iobj",
      "list",      "mark",   "nmod",       "nsubj",    "nummod",  "obj",
      "obl",       "orphan", "parataxis",  "punct",    "reparandum",
      "root",      "vocative", "xcomp"};
  return rels;
}

void MockPolicy::Validate() const {
  for (const ProbabilityField& f : kProbabilities) {
    const double p = this->*f.member;
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError(std::string(f.name) + " must be in [0, 1]");
    }
  }
}

MockPolicy MockPolicy::Effective() const {
  if (mode == MockMode::kNoisy) return *this;
  MockPolicy oracle;
  oracle.seed = seed;
  return oracle;
}

MockMode ParseMockMode(std::string_view name) {
  if (name == "oracle") return MockMode::kOracle;
  if (name == "noisy") return MockMode::kNoisy;
  throw ConfigError("mock mode must be oracle or noisy, got '" +
                    std::string(name) + "'");
}

MockPolicy MockPolicy::FromJson(std::string_view json) {
  const nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError("mock config must be a JSON object");
  }
  MockPolicy policy;
  for (const auto& [key, value] : j.items()) {
    if (key == "mode") {
      if (!value.is_string()) throw ConfigError("mock mode must be a string");
      policy.mode = ParseMockMode(value.get<std::string>());
      continue;
    }
    if (key == "seed") {
      if (!value.is_number_integer()) {
        throw ConfigError("mock seed must be an integer");
      }
      policy.seed = value.get<uint64_t>();
      continue;
    }
    bool known = false;
    for (const ProbabilityField& f : kProbabilities) {
      if (key == f.name) {
        if (!value.is_number()) {
          throw ConfigError(key + " must be a number");
        }
        policy.*f.member = value.get<double>();
        known = true;
      }
    }
    if (!known) throw ConfigError("unknown mock config key '" + key + "'");
  }
  policy.Validate();
  return policy;
}

std::string MockPolicy::ToJson() const {
  nlohmann::ordered_json j;
  j["mode"] = mode == MockMode::kOracle ? "oracle" : "noisy";
  j["seed"] = seed;
  for (const ProbabilityField& f : kProbabilities) j[f.name] = this->*f.member;
  return j.dump();
}

std::string MockComplete(const PromptBundle& bundle, const Sentence& gold,
                         const StepPlan& plan, const MockPolicy& policy) {
  const MockPolicy p = policy.Effective();
  if (policy.mode == MockMode::kOracle) return bundle.gold_assistant;
  p.Validate();

  Rng rng(DeriveSeed(p.seed, gold.sent_id));
  const int n = static_cast<int>(gold.tokens.size());
  std::vector<ReplyRow> rows = GoldRows(gold);
  std::vector<int> heads;
  for (const Token& t : gold.tokens) heads.push_back(t.head);

  for (int i = 0; i < n; ++i) {
    const Token& t = gold.tokens[i];
    if (rng.Bernoulli(p.p_head_error) && t.head != 0) {
      // {0..n} without the gold head and the token itself.
      std::vector<int> candidates;
      for (int h = 0; h <= n; ++h) {
        if (h != t.head && h != t.id) candidates.push_back(h);
      }
      heads[i] = candidates[rng.Below(candidates.size())];
    }
    if (rng.Bernoulli(p.p_upos_error)) {
      rows[i][2] = OtherThan(UposTags(), rows[i][2], rng);
    }
    if (rng.Bernoulli(p.p_deprel_error)) {
      rows[i][4] = OtherThan(UniversalRelations(), rows[i][4], rng);
    }
    if (rng.Bernoulli(p.p_form_error)) {
      switch (rng.Below(3)) {
        case 0:
          rows[i][1] += '#';
          break;
        case 1:
          rows[i][1] = DropLastCharacter(rows[i][1]);
          break;
        default:
          rows[i][0] = std::to_string(t.id + n);
          break;
      }
    }
  }
  if (n >= 2) {
    if (rng.Bernoulli(p.p_multi_root)) {
      std::vector<int> attached;
      for (int i = 0; i < n; ++i) {
        if (heads[i] != 0) attached.push_back(i);
      }
      if (!attached.empty()) heads[attached[rng.Below(attached.size())]] = 0;
    }
    if (rng.Bernoulli(p.p_cycle)) {
      const auto a = static_cast<int>(rng.Below(n));
      auto b = static_cast<int>(rng.Below(n - 1));
      if (b >= a) ++b;
      heads[a] = b + 1;
      heads[b] = a + 1;
    }
  }

  std::vector<ReplyRow> emitted;
  emitted.reserve(rows.size());
  for (int i = 0; i < n; ++i) {
    rows[i][3] = std::to_string(heads[i]);
    if (rng.Bernoulli(p.p_drop_row)) continue;
    if (rng.Bernoulli(p.p_field_count)) rows[i].pop_back();
    emitted.push_back(std::move(rows[i]));
  }
  return RenderAssistant(emitted, plan);
}

}  // namespace llmdep
