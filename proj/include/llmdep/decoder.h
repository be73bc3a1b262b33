#ifndef LLMDEP_DECODER_H_
#define LLMDEP_DECODER_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "llmdep/prompts.h"
#include "llmdep/treebank.h"

namespace llmdep {

// ID, FORM, UPOS, HEAD, DEPREL.
inline constexpr size_t kRowFields = 5;

struct RawRow {
  int line_no = 0;  // 1-based line in the model text
  std::vector<std::string> fields;
  // The row had exactly kRowFields fields when extracted.
  bool parse_ok = false;
  // Recovery appended "_" fields to reach kRowFields.
  bool padded = false;

  friend bool operator==(const RawRow&, const RawRow&) = default;
};

enum class TableSource {
  kEmpty,         // no tab-containing line in the text
  kAllRows,       // one-step plan: every tab-containing line
  kTaskHeader,    // rows after the last "- Task <final>" header
  kFallbackRun,   // header missing: last contiguous run of TSV lines
};

struct ParsedTable {
  std::vector<RawRow> rows;
  TableSource source = TableSource::kEmpty;

  bool empty() const { return rows.empty(); }
  friend bool operator==(const ParsedTable&, const ParsedTable&) = default;
};

struct ValidityReport {
  size_t n_rows = 0;
  // Rows whose head is 0; a well-formed tree has exactly one.
  size_t root_count = 0;
  // Some head chain of length >= 2 returns to its start.
  bool has_cycle = false;
  // Heads that are not integers or fall outside 0..n_rows.
  size_t out_of_range_heads = 0;
  size_t self_loops = 0;

  bool multiple_roots() const { return root_count > 1; }
  bool Clean() const {
    return n_rows > 0 && root_count == 1 && !has_cycle &&
           out_of_range_heads == 0 && self_loops == 0;
  }
  friend bool operator==(const ValidityReport&, const ValidityReport&) =
      default;
};

// Pulls the final five-field table out of arbitrary model text. Fields are
// stripped of surrounding spaces; empty fields produced by trailing tabs are
// dropped. Never throws: text without any TSV line gives an empty table.
ParsedTable ExtractFinalTable(std::string_view model_text,
                              const StepPlan& plan);

// Restores ID and FORM row by row from the gold word list, truncates rows
// beyond the list and pads short rows with "_". Rows that are missing are
// not created, and UPOS/HEAD/DEPREL are left untouched.
ParsedTable Recover(ParsedTable table,
                    const std::vector<std::string>& gold_forms);

// heads[i] is the head of word i + 1. Only heads in 1..n other than the word
// itself are followed. O(n).
bool HasCycle(std::span<const int> heads);

// Validity counters of a (system) sentence whose token ids are positions.
ValidityReport CheckValidity(const Sentence& sentence);

struct DecodedSentence {
  Sentence sentence;
  ValidityReport validity;
};

// Builds tokens from table rows. Token ids are row positions; heads that are
// not integers in 0..n become kInvalidHead. Never throws.
DecodedSentence ToSentence(const ParsedTable& table, std::string sent_id);

// Extraction, recovery and conversion for one completion. `raw` is the
// system sentence before recovery, used for token recall as emitted.
struct Decoded {
  ParsedTable table;
  ParsedTable recovered;
  DecodedSentence raw;
  DecodedSentence system;
};

Decoded DecodeCompletion(std::string_view model_text, const Sentence& gold,
                         const StepPlan& plan);

// "sent_id\tn_rows\troots\thas_cycle\tout_of_range_heads\tself_loops"
std::string_view ValidityTsvHeader();
std::string ValidityTsvRow(std::string_view sent_id,
                           const ValidityReport& report);
std::string ValidityJson(std::string_view sent_id,
                         const ValidityReport& report);

}  // namespace llmdep

#endif  // LLMDEP_DECODER_H_
