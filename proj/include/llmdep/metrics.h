#ifndef LLMDEP_METRICS_H_
#define LLMDEP_METRICS_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "llmdep/decoder.h"
#include "llmdep/treebank.h"

namespace llmdep {

enum class AlignMethod { kExactSpan, kLcsFallback };

// One-to-one, monotone pairs of 0-based (gold, system) token indices.
struct Alignment {
  std::vector<std::pair<size_t, size_t>> pairs;
  AlignMethod method = AlignMethod::kExactSpan;
};

// Tokens are placed as character spans over the concatenation of their
// whitespace-stripped forms. When both concatenations are equal, tokens with
// identical spans align. Otherwise a character LCS is computed and a gold
// token aligns to the system token it maps onto character for character.
Alignment Align(const Sentence& gold, const Sentence& system);

// Matched/gold/system counts of one metric.
struct MetricCounts {
  int64_t matched = 0;
  int64_t n_gold = 0;
  int64_t n_system = 0;

  double Precision() const;
  double Recall() const;
  double F1() const;
  MetricCounts& operator+=(const MetricCounts& o);
  friend bool operator==(const MetricCounts&, const MetricCounts&) = default;
};

struct SentenceCounts {
  MetricCounts tokens;
  MetricCounts upos;
  MetricCounts uas;
  MetricCounts las;

  SentenceCounts& operator+=(const SentenceCounts& o);
  friend bool operator==(const SentenceCounts&, const SentenceCounts&) =
      default;
};

// UPOS matches need equal tags; UAS matches need both heads 0 or heads that
// are themselves an aligned pair; LAS matches add an equal DEPREL.
SentenceCounts ScoreSentence(const Sentence& gold, const Sentence& system,
                             const Alignment& alignment);

struct ValiditySummary {
  int64_t sentences = 0;
  int64_t clean = 0;
  int64_t empty_output = 0;
  int64_t multiple_roots = 0;
  int64_t no_root = 0;
  int64_t with_cycle = 0;
  int64_t out_of_range_heads = 0;
  int64_t self_loops = 0;

  void Add(const ValidityReport& report);
  ValiditySummary& operator+=(const ValiditySummary& o);
  friend bool operator==(const ValiditySummary&, const ValiditySummary&) =
      default;
};

// Sums over a corpus. Addition is commutative, so sentence order and
// parallel reduction order do not change the totals.
struct CorpusCounts {
  SentenceCounts recovered;
  // Token counts of the output as emitted, before recovery.
  MetricCounts raw_tokens;
  ValiditySummary validity;

  CorpusCounts& operator+=(const CorpusCounts& o);
  friend bool operator==(const CorpusCounts&, const CorpusCounts&) = default;
};

// Scores one decoded completion against its gold sentence.
CorpusCounts ScoreDecoded(const Sentence& gold, const Decoded& decoded);

struct EvalReport {
  MetricCounts tokens;
  MetricCounts upos;
  MetricCounts uas;
  MetricCounts las;
  MetricCounts raw_tokens;
  ValiditySummary validity;

  // Percentages in tenths, rounded half up from the exact ratio.
  int TokenRecallTenths() const;
  int RawTokenRecallTenths() const;
  int UposF1Tenths() const;
  int UasF1Tenths() const;
  int LasF1Tenths() const;
};

EvalReport Aggregate(const CorpusCounts& counts);

// Round-half-up tenths of 100 * numerator / denominator; 0 if the
// denominator is 0.
int PercentTenths(int64_t numerator, int64_t denominator);
int PrecisionTenths(const MetricCounts& c);
int RecallTenths(const MetricCounts& c);
int F1Tenths(const MetricCounts& c);
// 917 -> "91.7"
std::string FormatTenths(int tenths);

// "token_recall\tupos\tuas\tlas"
std::string_view ReportTsvHeader();
// Token recall, then UPOS, UAS and LAS F1, tab-separated.
std::string ReportLine(const EvalReport& report);
std::string ReportJson(const EvalReport& report);

struct CurvePoint {
  size_t size = 0;
  EvalReport report;
};

// Header "size\ttoken_recall\ttoken_recall_after_recovery\tupos_r\tupos_p\t
// head_r\thead_deprel_r", one row per point in ascending size. Throws
// ConfigError on repeated sizes.
std::string CurveTable(std::vector<CurvePoint> points);

}  // namespace llmdep

#endif  // LLMDEP_METRICS_H_
