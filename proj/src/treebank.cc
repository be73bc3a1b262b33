#include "llmdep/treebank.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "llmdep/errors.h"
#include "llmdep/random.h"
#include <json.hpp>
#include "text_util.h"

namespace llmdep {
namespace {

constexpr size_t kConlluColumns = 10;

struct PendingSentence {
  std::optional<std::string> sent_id;
  std::optional<std::string> text;
  std::vector<Token> tokens;
  size_t first_line = 0;

  bool empty() const { return tokens.empty(); }
};

// Returns the value of a "# key = value" comment, if the line is one.
std::optional<std::string> CommentValue(std::string_view line,
                                        std::string_view key) {
  std::string_view rest = Trim(line.substr(1));
  if (!rest.starts_with(key)) return std::nullopt;
  rest = TrimLeft(rest.substr(key.size()));
  if (rest.empty() || rest.front() != '=') return std::nullopt;
  return std::string(Trim(rest.substr(1)));
}

std::string LineError(size_t line_no, std::string_view what) {
  return "line " + std::to_string(line_no) + ": " + std::string(what);
}

class ConlluReader {
 public:
  ConlluReader(std::string language_code, Split split,
               const ConlluReadOptions& options)
      : options_(options) {
    treebank_.language_code = std::move(language_code);
    treebank_.split = split;
  }

  void Line(std::string_view line, size_t line_no) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) {
      Flush();
      return;
    }
    if (pending_.first_line == 0) pending_.first_line = line_no;
    if (line.front() == '#') {
      if (!pending_.empty()) return;
      if (auto v = CommentValue(line, "sent_id")) pending_.sent_id = *v;
      else if (auto t = CommentValue(line, "text")) pending_.text = *t;
      return;
    }
    std::vector<std::string_view> cols = SplitTabs(line);
    if (cols.size() != kConlluColumns) {
      throw FormatError(LineError(
          line_no, "expected 10 tab-separated columns, found " +
                       std::to_string(cols.size())));
    }
    const std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos ||
        id.find('.') != std::string_view::npos) {
      return;  // multiword token range or empty node
    }
    Token token;
    auto parsed_id = ParseInt(id);
    if (!parsed_id) {
      throw FormatError(LineError(line_no, "non-integer ID '" +
                                               std::string(id) + "'"));
    }
    token.id = *parsed_id;
    token.form = std::string(cols[1]);
    token.upos = std::string(cols[3]);
    token.deprel = std::string(cols[7]);
    auto head = ParseInt(cols[6]);
    if (!head) {
      if (!options_.lenient) {
        throw FormatError(LineError(
            line_no, "non-integer HEAD '" + std::string(cols[6]) + "'"));
      }
      token.head = kInvalidHead;
    } else {
      token.head = *head;
    }
    pending_.tokens.push_back(std::move(token));
  }

  Treebank Finish() {
    Flush();
    return std::move(treebank_);
  }

 private:
  void Flush() {
    if (pending_.empty()) {
      pending_ = {};
      return;
    }
    Sentence sentence;
    sentence.sent_id =
        pending_.sent_id.value_or("s" + std::to_string(next_index_));
    sentence.text = std::move(pending_.text);
    sentence.tokens = std::move(pending_.tokens);
    ++next_index_;
    if (options_.lenient) {
      const int n = static_cast<int>(sentence.tokens.size());
      for (Token& t : sentence.tokens) {
        if (t.head < 0 || t.head > n) t.head = kInvalidHead;
      }
    } else {
      try {
        ValidateSentence(sentence);
      } catch (const FormatError& e) {
        throw FormatError(std::string(e.what()) + " (block starting at line " +
                          std::to_string(pending_.first_line) + ")");
      }
    }
    if (!seen_ids_.insert(sentence.sent_id).second) {
      throw FormatError("duplicate sent_id '" + sentence.sent_id + "'");
    }
    treebank_.sentences.push_back(std::move(sentence));
    pending_ = {};
  }

  ConlluReadOptions options_;
  Treebank treebank_;
  PendingSentence pending_;
  std::unordered_set<std::string> seen_ids_;
  size_t next_index_ = 1;
};

std::string_view OrUnderscore(std::string_view s) {
  return s.empty() ? std::string_view("_") : s;
}

}  // namespace

std::string Sentence::Text() const {
  if (text) return *text;
  std::string out;
  for (const Token& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.form;
  }
  return out;
}

std::vector<std::string> Sentence::Forms() const {
  std::vector<std::string> forms;
  forms.reserve(tokens.size());
  for (const Token& t : tokens) forms.push_back(t.form);
  return forms;
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw ConfigError("unknown split '" + std::string(name) + "'");
}

void ValidateSentence(const Sentence& sentence) {
  const std::string where = "sentence '" + sentence.sent_id + "': ";
  if (sentence.tokens.empty()) throw FormatError(where + "no tokens");
  const int n = static_cast<int>(sentence.tokens.size());
  for (int i = 0; i < n; ++i) {
    const Token& t = sentence.tokens[i];
    if (t.id != i + 1) {
      throw FormatError(where + "token ids must be 1..N in order, found " +
                        std::to_string(t.id) + " at position " +
                        std::to_string(i + 1));
    }
    if (t.head < 0 || t.head > n) {
      throw FormatError(where + "head " + std::to_string(t.head) +
                        " of token " + std::to_string(t.id) +
                        " is out of range 0.." + std::to_string(n));
    }
    if (t.head == t.id) {
      throw FormatError(where + "token " + std::to_string(t.id) +
                        " is its own head");
    }
    if (t.form.empty()) {
      throw FormatError(where + "token " + std::to_string(t.id) +
                        " has an empty form");
    }
    if (t.form.find_first_of("\t\n\r") != std::string::npos) {
      throw FormatError(where + "form of token " + std::to_string(t.id) +
                        " contains a tab or newline");
    }
  }
}

Treebank ParseConllu(std::istream& in, std::string language_code, Split split,
                     const ConlluReadOptions& options) {
  ConlluReader reader(std::move(language_code), split, options);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) reader.Line(line, ++line_no);
  if (in.bad()) throw IoError("read failure after line " + std::to_string(line_no));
  return reader.Finish();
}

Treebank ParseConlluString(std::string_view text, std::string language_code,
                           Split split, const ConlluReadOptions& options) {
  std::istringstream in{std::string(text)};
  return ParseConllu(in, std::move(language_code), split, options);
}

Treebank ReadConlluFile(const std::string& path, std::string language_code,
                        Split split, const ConlluReadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return ParseConllu(in, std::move(language_code), split, options);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void WriteConllu(const Treebank& treebank, std::ostream& out) {
  for (const Sentence& s : treebank.sentences) {
    out << "# sent_id = " << s.sent_id << '\n';
    if (s.text) out << "# text = " << *s.text << '\n';
    for (const Token& t : s.tokens) {
      out << t.id << '\t' << OrUnderscore(t.form) << "\t_\t"
          << OrUnderscore(t.upos) << "\t_\t_\t";
      if (t.head == kInvalidHead) {
        out << '_';
      } else {
        out << t.head;
      }
      out << '\t' << OrUnderscore(t.deprel) << "\t_\t_\n";
    }
    out << '\n';
  }
}

std::string WriteConlluString(const Treebank& treebank) {
  std::ostringstream out;
  WriteConllu(treebank, out);
  return out.str();
}

CorpusStats ComputeStats(const Treebank& treebank) {
  CorpusStats stats;
  stats.n_sentences = static_cast<int64_t>(treebank.sentences.size());
  for (const Sentence& s : treebank.sentences) {
    stats.n_tokens += static_cast<int64_t>(s.tokens.size());
  }
  return stats;
}

std::string StatsTsv(const CorpusStats& stats) {
  return "n_sentences\t" + std::to_string(stats.n_sentences) +
         "\nn_tokens\t" + std::to_string(stats.n_tokens) + "\n";
}

std::string StatsJson(const CorpusStats& stats) {
  nlohmann::ordered_json j;
  j["n_sentences"] = stats.n_sentences;
  j["n_tokens"] = stats.n_tokens;
  return j.dump();
}

std::vector<size_t> SamplingOrder(size_t corpus_size, uint64_t seed) {
  std::vector<size_t> order(corpus_size);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(DeriveSeed(seed, "subsample"));
  // Fisher-Yates, drawing the front slot first so any prefix is uniform.
  for (size_t i = 0; i + 1 < corpus_size; ++i) {
    const size_t j = i + static_cast<size_t>(rng.Below(corpus_size - i));
    std::swap(order[i], order[j]);
  }
  return order;
}

Treebank Subsample(const Treebank& treebank, size_t n, uint64_t seed) {
  const size_t size = treebank.sentences.size();
  if (n > size) {
    throw ConfigError("cannot sample " + std::to_string(n) +
                      " sentences from a corpus of " + std::to_string(size));
  }
  std::vector<size_t> chosen = SamplingOrder(size, seed);
  chosen.resize(n);
  std::sort(chosen.begin(), chosen.end());
  Treebank out;
  out.language_code = treebank.language_code;
  out.split = treebank.split;
  out.sentences.reserve(n);
  for (size_t i : chosen) out.sentences.push_back(treebank.sentences[i]);
  return out;
}

size_t KeptCount(double fraction, size_t count) {
  const double x = fraction * static_cast<double>(count);
  const double nearest = std::round(x);
  // 0.17 * 100 is 17.000000000000004 in binary floating point.
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, x)) {
    return static_cast<size_t>(nearest);
  }
  return static_cast<size_t>(std::ceil(x));
}

MixedTreebank MixMultilingual(const std::vector<Treebank>& parts,
                              const std::map<std::string, double>& downsample,
                              uint64_t seed) {
  std::set<std::string> codes;
  for (const Treebank& part : parts) {
    if (!codes.insert(part.language_code).second) {
      throw ConfigError("duplicate language code '" + part.language_code +
                        "' in mix");
    }
  }
  for (const auto& [code, fraction] : downsample) {
    if (!codes.contains(code)) {
      throw ConfigError("downsample given for '" + code +
                        "', which is not among the mixed treebanks");
    }
    if (!(fraction > 0.0 && fraction <= 1.0)) {
      throw ConfigError("downsample fraction for '" + code +
                        "' must be in (0, 1]");
    }
  }

  MixedTreebank mixed;
  mixed.treebank.language_code = parts.size() == 1 ? parts[0].language_code
                                                   : std::string("multi");
  if (!parts.empty()) mixed.treebank.split = parts[0].split;
  std::unordered_set<std::string> used_ids;
  for (const Treebank& part : parts) {
    PartProvenance prov;
    prov.language_code = part.language_code;
    prov.available = part.sentences.size();
    auto it = downsample.find(part.language_code);
    Treebank kept =
        it == downsample.end()
            ? part
            : Subsample(part, KeptCount(it->second, part.sentences.size()),
                        DeriveSeed(seed, part.language_code));
    prov.kept = kept.sentences.size();
    for (Sentence& s : kept.sentences) {
      prov.kept_tokens += static_cast<int64_t>(s.tokens.size());
      if (used_ids.contains(s.sent_id)) {
        s.sent_id = part.language_code + "/" + s.sent_id;
        if (used_ids.contains(s.sent_id)) {
          throw FormatError("sent_id '" + s.sent_id +
                            "' is not unique in the mix");
        }
      }
      used_ids.insert(s.sent_id);
      mixed.sentence_languages.push_back(part.language_code);
      mixed.treebank.sentences.push_back(std::move(s));
    }
    mixed.provenance.push_back(prov);
  }
  return mixed;
}

std::string LanguageCodeFromPath(std::string_view path) {
  const size_t slash = path.find_last_of('/');
  std::string_view base =
      slash == std::string_view::npos ? path : path.substr(slash + 1);
  const size_t ud = base.find("-ud-");
  if (ud == std::string_view::npos || ud == 0) return "";
  return std::string(base.substr(0, ud));
}

Split SplitFromPath(std::string_view path) {
  if (path.find("-ud-dev") != std::string_view::npos) return Split::kDev;
  if (path.find("-ud-test") != std::string_view::npos) return Split::kTest;
  return Split::kTrain;
}

}  // namespace llmdep
