#include "llmdep/decoder.h"

#include <cctype>

#include <json.hpp>
#include "text_util.h"

namespace llmdep {
namespace {

bool HasTab(std::string_view line) {
  return line.find('\t') != std::string_view::npos;
}

// "- Task 3", optionally followed by non-digit text such as ':'.
bool IsTaskHeader(std::string_view line, int task) {
  const std::string prefix = "- Task " + std::to_string(task);
  line = Trim(line);
  if (!line.starts_with(prefix)) return false;
  return line.size() == prefix.size() ||
         !std::isdigit(static_cast<unsigned char>(line[prefix.size()]));
}

bool IsAnyTaskHeader(std::string_view line) {
  return Trim(line).starts_with("- Task");
}

RawRow MakeRow(std::string_view line, int line_no) {
  RawRow row;
  row.line_no = line_no;
  for (std::string_view f : SplitTabs(line)) {
    row.fields.emplace_back(Trim(f));
  }
  while (row.fields.size() > 1 && row.fields.back().empty()) {
    row.fields.pop_back();
  }
  row.parse_ok = row.fields.size() == kRowFields;
  return row;
}

}  // namespace

ParsedTable ExtractFinalTable(std::string_view model_text,
                              const StepPlan& plan) {
  const std::vector<std::string_view> lines = SplitLines(model_text);
  ParsedTable table;
  auto add = [&](size_t i) {
    table.rows.push_back(MakeRow(lines[i], static_cast<int>(i + 1)));
  };

  if (plan.steps() == 1) {
    for (size_t i = 0; i < lines.size(); ++i) {
      if (HasTab(lines[i])) add(i);
    }
    table.source = table.empty() ? TableSource::kEmpty : TableSource::kAllRows;
    return table;
  }

  size_t header = lines.size();
  for (size_t i = lines.size(); i-- > 0;) {
    if (IsTaskHeader(lines[i], plan.steps())) {
      header = i;
      break;
    }
  }
  if (header < lines.size()) {
    for (size_t i = header + 1; i < lines.size(); ++i) {
      if (IsAnyTaskHeader(lines[i])) break;
      if (HasTab(lines[i])) add(i);
    }
    if (!table.empty()) {
      table.source = TableSource::kTaskHeader;
      return table;
    }
  }

  // Last contiguous run of tab-containing lines.
  size_t end = lines.size();
  while (end > 0 && !HasTab(lines[end - 1])) --end;
  size_t begin = end;
  while (begin > 0 && HasTab(lines[begin - 1])) --begin;
  for (size_t i = begin; i < end; ++i) add(i);
  table.source =
      table.empty() ? TableSource::kEmpty : TableSource::kFallbackRun;
  return table;
}

ParsedTable Recover(ParsedTable table,
                    const std::vector<std::string>& gold_forms) {
  if (table.rows.size() > gold_forms.size()) {
    table.rows.resize(gold_forms.size());
  }
  for (size_t i = 0; i < table.rows.size(); ++i) {
    RawRow& row = table.rows[i];
    if (row.fields.size() < kRowFields) {
      row.fields.resize(kRowFields, "_");
      row.padded = true;
    }
    row.fields[0] = std::to_string(i + 1);
    row.fields[1] = gold_forms[i];
  }
  return table;
}

bool HasCycle(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  // 0 = unvisited, 1 = on the current walk, 2 = finished.
  std::vector<char> state(n, 0);
  auto next = [&](int v) {
    const int h = heads[v];
    return (h >= 1 && h <= n && h != v + 1) ? h - 1 : -1;
  };
  std::vector<int> walk;
  for (int start = 0; start < n; ++start) {
    if (state[start] != 0) continue;
    walk.clear();
    int v = start;
    while (v >= 0 && state[v] == 0) {
      state[v] = 1;
      walk.push_back(v);
      v = next(v);
    }
    if (v >= 0 && state[v] == 1) return true;
    for (int w : walk) state[w] = 2;
  }
  return false;
}

ValidityReport CheckValidity(const Sentence& sentence) {
  ValidityReport report;
  const int n = static_cast<int>(sentence.tokens.size());
  report.n_rows = sentence.tokens.size();
  std::vector<int> heads;
  heads.reserve(n);
  for (const Token& t : sentence.tokens) {
    heads.push_back(t.head);
    if (t.head < 0 || t.head > n) {
      ++report.out_of_range_heads;
    } else if (t.head == 0) {
      ++report.root_count;
    } else if (t.head == t.id) {
      ++report.self_loops;
    }
  }
  report.has_cycle = HasCycle(heads);
  return report;
}

DecodedSentence ToSentence(const ParsedTable& table, std::string sent_id) {
  DecodedSentence out;
  out.sentence.sent_id = std::move(sent_id);
  const int n = static_cast<int>(table.rows.size());
  for (int i = 0; i < n; ++i) {
    const std::vector<std::string>& f = table.rows[i].fields;
    auto field = [&](size_t k) -> std::string {
      return k < f.size() ? f[k] : std::string();
    };
    Token token;
    token.id = i + 1;
    token.form = field(1);
    token.upos = field(2);
    token.deprel = field(4);
    std::optional<int> head = ParseInt(field(3));
    token.head = head && *head >= 0 && *head <= n ? *head : kInvalidHead;
    out.sentence.tokens.push_back(std::move(token));
  }
  out.validity = CheckValidity(out.sentence);
  return out;
}

Decoded DecodeCompletion(std::string_view model_text, const Sentence& gold,
                         const StepPlan& plan) {
  Decoded d;
  d.table = ExtractFinalTable(model_text, plan);
  d.recovered = Recover(d.table, gold.Forms());
  d.raw = ToSentence(d.table, gold.sent_id);
  d.system = ToSentence(d.recovered, gold.sent_id);
  return d;
}

std::string_view ValidityTsvHeader() {
  return "sent_id\tn_rows\troots\thas_cycle\tout_of_range_heads\tself_loops";
}

std::string ValidityTsvRow(std::string_view sent_id,
                           const ValidityReport& r) {
  return std::string(sent_id) + '\t' + std::to_string(r.n_rows) + '\t' +
         std::to_string(r.root_count) + '\t' + (r.has_cycle ? "1" : "0") +
         '\t' + std::to_string(r.out_of_range_heads) + '\t' +
         std::to_string(r.self_loops);
}

std::string ValidityJson(std::string_view sent_id, const ValidityReport& r) {
  nlohmann::ordered_json j;
  j["sent_id"] = sent_id;
  j["n_rows"] = r.n_rows;
  j["roots"] = r.root_count;
  j["has_cycle"] = r.has_cycle;
  j["out_of_range_heads"] = r.out_of_range_heads;
  j["self_loops"] = r.self_loops;
  j["clean"] = r.Clean();
  return j.dump();
}

}  // namespace llmdep
