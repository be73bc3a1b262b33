#include "llmdep/metrics.h"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "llmdep/errors.h"
#include <json.hpp>
#include "text_util.h"

namespace llmdep {
namespace {

bool IsStrippedSpace(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == 0x00A0 || c == 0x3000;
}

struct CharLayout {
  std::u32string chars;
  // [begin, end) of each token in `chars`.
  std::vector<std::pair<size_t, size_t>> spans;
};

CharLayout Layout(const Sentence& s) {
  CharLayout layout;
  for (const Token& t : s.tokens) {
    const size_t begin = layout.chars.size();
    for (char32_t c : DecodeUtf8(t.form)) {
      if (!IsStrippedSpace(c)) layout.chars.push_back(c);
    }
    layout.spans.emplace_back(begin, layout.chars.size());
  }
  return layout;
}

std::vector<std::pair<size_t, size_t>> AlignEqualSpans(const CharLayout& g,
                                                       const CharLayout& s) {
  std::vector<std::pair<size_t, size_t>> pairs;
  size_t i = 0, j = 0;
  while (i < g.spans.size() && j < s.spans.size()) {
    const auto [gb, ge] = g.spans[i];
    const auto [sb, se] = s.spans[j];
    if (se == sb) {
      ++j;  // empty system token
    } else if (gb == sb && ge == se) {
      pairs.emplace_back(i++, j++);
    } else if (ge < se) {
      ++i;
    } else if (se < ge) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return pairs;
}

// For each gold character, the system character it is matched to by the
// canonical LCS, or -1.
std::vector<long> LcsMatch(const std::u32string& a, const std::u32string& b) {
  const size_t n = a.size(), m = b.size();
  const size_t w = m + 1;
  std::vector<uint32_t> dp((n + 1) * w, 0);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      dp[i * w + j] = a[i - 1] == b[j - 1]
                          ? dp[(i - 1) * w + j - 1] + 1
                          : std::max(dp[(i - 1) * w + j], dp[i * w + j - 1]);
    }
  }
  std::vector<long> match(n, -1);
  size_t i = n, j = m;
  while (i > 0 && j > 0) {
    if (a[i - 1] == b[j - 1]) {
      match[i - 1] = static_cast<long>(j - 1);
      --i;
      --j;
      continue;
    }
    const uint32_t up = dp[(i - 1) * w + j];
    const uint32_t left = dp[i * w + j - 1];
    // On ties drop the larger character, which is the same choice whichever
    // side is called gold.
    if (up > left || (up == left && a[i - 1] > b[j - 1])) {
      --i;
    } else {
      --j;
    }
  }
  return match;
}

std::vector<std::pair<size_t, size_t>> AlignByLcs(const CharLayout& g,
                                                  const CharLayout& s) {
  const std::vector<long> match = LcsMatch(g.chars, s.chars);
  std::unordered_map<size_t, size_t> sys_by_begin;
  for (size_t j = 0; j < s.spans.size(); ++j) {
    if (s.spans[j].second > s.spans[j].first) {
      sys_by_begin.emplace(s.spans[j].first, j);
    }
  }
  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t i = 0; i < g.spans.size(); ++i) {
    const auto [gb, ge] = g.spans[i];
    if (gb == ge || match[gb] < 0) continue;
    const auto sb = static_cast<size_t>(match[gb]);
    auto it = sys_by_begin.find(sb);
    if (it == sys_by_begin.end()) continue;
    const auto [tb, te] = s.spans[it->second];
    if (te - tb != ge - gb) continue;
    bool whole = true;
    for (size_t k = 0; k < ge - gb && whole; ++k) {
      whole = match[gb + k] == static_cast<long>(sb + k);
    }
    if (whole) pairs.emplace_back(i, it->second);
  }
  return pairs;
}

}  // namespace

Alignment Align(const Sentence& gold, const Sentence& system) {
  const CharLayout g = Layout(gold);
  const CharLayout s = Layout(system);
  Alignment a;
  if (g.chars == s.chars) {
    a.method = AlignMethod::kExactSpan;
    a.pairs = AlignEqualSpans(g, s);
  } else {
    a.method = AlignMethod::kLcsFallback;
    a.pairs = AlignByLcs(g, s);
  }
  return a;
}

double MetricCounts::Precision() const {
  return n_system == 0 ? 0.0 : 100.0 * matched / n_system;
}

double MetricCounts::Recall() const {
  return n_gold == 0 ? 0.0 : 100.0 * matched / n_gold;
}

double MetricCounts::F1() const {
  if (n_gold == 0 || n_system == 0) return 0.0;
  return 100.0 * 2.0 * matched / (n_gold + n_system);
}

MetricCounts& MetricCounts::operator+=(const MetricCounts& o) {
  matched += o.matched;
  n_gold += o.n_gold;
  n_system += o.n_system;
  return *this;
}

SentenceCounts& SentenceCounts::operator+=(const SentenceCounts& o) {
  tokens += o.tokens;
  upos += o.upos;
  uas += o.uas;
  las += o.las;
  return *this;
}

SentenceCounts ScoreSentence(const Sentence& gold, const Sentence& system,
                             const Alignment& alignment) {
  const auto n_gold = static_cast<int64_t>(gold.tokens.size());
  const auto n_sys = static_cast<int64_t>(system.tokens.size());
  std::vector<long> gold_to_sys(gold.tokens.size(), -1);
  for (const auto& [g, s] : alignment.pairs) {
    gold_to_sys[g] = static_cast<long>(s);
  }
  SentenceCounts c;
  for (MetricCounts* m : {&c.tokens, &c.upos, &c.uas, &c.las}) {
    m->n_gold = n_gold;
    m->n_system = n_sys;
  }
  for (const auto& [g, s] : alignment.pairs) {
    const Token& gt = gold.tokens[g];
    const Token& st = system.tokens[s];
    ++c.tokens.matched;
    if (gt.upos == st.upos) ++c.upos.matched;
    bool head_ok = false;
    if (gt.head == 0 || st.head == 0) {
      head_ok = gt.head == 0 && st.head == 0;
    } else if (gt.head > 0 && gt.head <= n_gold && st.head > 0 &&
               st.head <= n_sys) {
      head_ok = gold_to_sys[gt.head - 1] == st.head - 1;
    }
    if (head_ok) {
      ++c.uas.matched;
      if (gt.deprel == st.deprel) ++c.las.matched;
    }
  }
  return c;
}

void ValiditySummary::Add(const ValidityReport& r) {
  ++sentences;
  if (r.Clean()) ++clean;
  if (r.n_rows == 0) ++empty_output;
  if (r.root_count > 1) ++multiple_roots;
  if (r.n_rows > 0 && r.root_count == 0) ++no_root;
  if (r.has_cycle) ++with_cycle;
  out_of_range_heads += static_cast<int64_t>(r.out_of_range_heads);
  self_loops += static_cast<int64_t>(r.self_loops);
}

ValiditySummary& ValiditySummary::operator+=(const ValiditySummary& o) {
  sentences += o.sentences;
  clean += o.clean;
  empty_output += o.empty_output;
  multiple_roots += o.multiple_roots;
  no_root += o.no_root;
  with_cycle += o.with_cycle;
  out_of_range_heads += o.out_of_range_heads;
  self_loops += o.self_loops;
  return *this;
}

CorpusCounts& CorpusCounts::operator+=(const CorpusCounts& o) {
  recovered += o.recovered;
  raw_tokens += o.raw_tokens;
  validity += o.validity;
  return *this;
}

CorpusCounts ScoreDecoded(const Sentence& gold, const Decoded& decoded) {
  CorpusCounts c;
  const Sentence& sys = decoded.system.sentence;
  c.recovered = ScoreSentence(gold, sys, Align(gold, sys));
  const Sentence& raw = decoded.raw.sentence;
  c.raw_tokens = ScoreSentence(gold, raw, Align(gold, raw)).tokens;
  c.validity.Add(decoded.system.validity);
  return c;
}

int PercentTenths(int64_t numerator, int64_t denominator) {
  if (denominator <= 0) return 0;
  // floor(1000 n / d + 1/2) in exact integer arithmetic.
  return static_cast<int>((2000 * numerator + denominator) /
                          (2 * denominator));
}

int PrecisionTenths(const MetricCounts& c) {
  return c.n_gold == 0 ? 0 : PercentTenths(c.matched, c.n_system);
}

int RecallTenths(const MetricCounts& c) {
  return PercentTenths(c.matched, c.n_gold);
}

int F1Tenths(const MetricCounts& c) {
  if (c.n_gold == 0 || c.n_system == 0) return 0;
  return PercentTenths(2 * c.matched, c.n_gold + c.n_system);
}

std::string FormatTenths(int tenths) {
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

int EvalReport::TokenRecallTenths() const { return RecallTenths(tokens); }
int EvalReport::RawTokenRecallTenths() const {
  return RecallTenths(raw_tokens);
}
int EvalReport::UposF1Tenths() const { return F1Tenths(upos); }
int EvalReport::UasF1Tenths() const { return F1Tenths(uas); }
int EvalReport::LasF1Tenths() const { return F1Tenths(las); }

EvalReport Aggregate(const CorpusCounts& counts) {
  EvalReport r;
  r.tokens = counts.recovered.tokens;
  r.upos = counts.recovered.upos;
  r.uas = counts.recovered.uas;
  r.las = counts.recovered.las;
  r.raw_tokens = counts.raw_tokens;
  r.validity = counts.validity;
  return r;
}

std::string_view ReportTsvHeader() { return "token_recall\tupos\tuas\tlas"; }

std::string ReportLine(const EvalReport& r) {
  return FormatTenths(r.TokenRecallTenths()) + "\t" +
         FormatTenths(r.UposF1Tenths()) + "\t" +
         FormatTenths(r.UasF1Tenths()) + "\t" +
         FormatTenths(r.LasF1Tenths());
}

namespace {

nlohmann::ordered_json MetricJson(const MetricCounts& c) {
  nlohmann::ordered_json j;
  j["matched"] = c.matched;
  j["n_gold"] = c.n_gold;
  j["n_system"] = c.n_system;
  j["precision"] = PrecisionTenths(c) / 10.0;
  j["recall"] = RecallTenths(c) / 10.0;
  j["f1"] = F1Tenths(c) / 10.0;
  return j;
}

}  // namespace

std::string ReportJson(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["token_recall"] = r.TokenRecallTenths() / 10.0;
  j["token_recall_before_recovery"] = r.RawTokenRecallTenths() / 10.0;
  j["upos"] = r.UposF1Tenths() / 10.0;
  j["uas"] = r.UasF1Tenths() / 10.0;
  j["las"] = r.LasF1Tenths() / 10.0;
  j["n_gold_tokens"] = r.tokens.n_gold;
  j["n_system_tokens"] = r.tokens.n_system;
  j["counts"]["tokens"] = MetricJson(r.tokens);
  j["counts"]["tokens_before_recovery"] = MetricJson(r.raw_tokens);
  j["counts"]["upos"] = MetricJson(r.upos);
  j["counts"]["uas"] = MetricJson(r.uas);
  j["counts"]["las"] = MetricJson(r.las);
  const ValiditySummary& v = r.validity;
  j["validity"]["sentences"] = v.sentences;
  j["validity"]["clean"] = v.clean;
  j["validity"]["empty_output"] = v.empty_output;
  j["validity"]["multiple_roots"] = v.multiple_roots;
  j["validity"]["no_root"] = v.no_root;
  j["validity"]["with_cycle"] = v.with_cycle;
  j["validity"]["out_of_range_heads"] = v.out_of_range_heads;
  j["validity"]["self_loops"] = v.self_loops;
  return j.dump(2);
}

std::string CurveTable(std::vector<CurvePoint> points) {
  std::sort(points.begin(), points.end(),
            [](const CurvePoint& a, const CurvePoint& b) {
              return a.size < b.size;
            });
  for (size_t i = 1; i < points.size(); ++i) {
    if (points[i].size == points[i - 1].size) {
      throw ConfigError("curve table has two reports for size " +
                        std::to_string(points[i].size));
    }
  }
  std::string out =
      "size\ttoken_recall\ttoken_recall_after_recovery\tupos_r\tupos_p\t"
      "head_r\thead_deprel_r\n";
  for (const CurvePoint& p : points) {
    const EvalReport& r = p.report;
    out += std::to_string(p.size) + "\t" +
           FormatTenths(RecallTenths(r.raw_tokens)) + "\t" +
           FormatTenths(RecallTenths(r.tokens)) + "\t" +
           FormatTenths(RecallTenths(r.upos)) + "\t" +
           FormatTenths(PrecisionTenths(r.upos)) + "\t" +
           FormatTenths(RecallTenths(r.uas)) + "\t" +
           FormatTenths(RecallTenths(r.las)) + "\n";
  }
  return out;
}

}  // namespace llmdep
