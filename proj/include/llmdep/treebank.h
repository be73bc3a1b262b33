#ifndef LLMDEP_TREEBANK_H_
#define LLMDEP_TREEBANK_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace llmdep {

// Head value used for tokens whose predicted head could not be read.
inline constexpr int kInvalidHead = -1;

// One syntactic word restricted to the ID, FORM, UPOS, HEAD and DEPREL
// columns of CoNLL-U.
struct Token {
  int id = 0;
  std::string form;
  std::string upos;
  int head = 0;
  std::string deprel;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::string sent_id;
  std::optional<std::string> text;
  std::vector<Token> tokens;

  size_t size() const { return tokens.size(); }
  // The "# text" comment when present, otherwise the forms joined by spaces.
  std::string Text() const;
  std::vector<std::string> Forms() const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

enum class Split { kTrain, kDev, kTest };

std::string_view SplitName(Split split);
// Accepts "train", "dev" and "test".
Split ParseSplit(std::string_view name);

struct Treebank {
  std::string language_code;
  Split split = Split::kTrain;
  std::vector<Sentence> sentences;

  friend bool operator==(const Treebank&, const Treebank&) = default;
};

struct CorpusStats {
  int64_t n_sentences = 0;
  int64_t n_tokens = 0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

// Throws FormatError when the sentence breaks the gold invariants: ids are
// 1..N in order, heads lie in 0..N and differ from the token id, forms are
// non-empty and free of tabs and newlines.
void ValidateSentence(const Sentence& sentence);

struct ConlluReadOptions {
  // Lenient mode accepts system output: unreadable or out-of-range heads
  // become kInvalidHead and self-attachments are kept.
  bool lenient = false;
};

// Reads the CoNLL-U subset. Multiword-token ranges ("1-2") and empty nodes
// ("5.1") are skipped; "# sent_id" and "# text" comments are kept. Sentences
// without a sent_id comment get "s<k>" with k their 1-based position.
// Throws FormatError naming the line number or sentence id.
Treebank ParseConllu(std::istream& in, std::string language_code = "",
                     Split split = Split::kTrain,
                     const ConlluReadOptions& options = {});
Treebank ParseConlluString(std::string_view text,
                           std::string language_code = "",
                           Split split = Split::kTrain,
                           const ConlluReadOptions& options = {});
// Throws IoError if the file cannot be opened.
Treebank ReadConlluFile(const std::string& path, std::string language_code = "",
                        Split split = Split::kTrain,
                        const ConlluReadOptions& options = {});

// Writes 10-column CoNLL-U with LF line endings. Columns other than the five
// retained ones are "_"; an invalid head is written as "_".
void WriteConllu(const Treebank& treebank, std::ostream& out);
std::string WriteConlluString(const Treebank& treebank);

CorpusStats ComputeStats(const Treebank& treebank);
// "n_sentences\t<n>\nn_tokens\t<n>\n"
std::string StatsTsv(const CorpusStats& stats);
std::string StatsJson(const CorpusStats& stats);

// Order in which sentences are drawn by Subsample for a given seed. Taking
// the first n entries of this permutation is the n-sample, so samples of
// increasing size from the same seed are nested.
std::vector<size_t> SamplingOrder(size_t corpus_size, uint64_t seed);

// Uniform sample of n sentences without replacement, deterministic in
// (n, seed), keeping corpus order. Throws ConfigError if n exceeds the size.
Treebank Subsample(const Treebank& treebank, size_t n, uint64_t seed);

// Number of sentences kept when a part of `count` sentences is downsampled
// to `fraction`: ceil(fraction * count).
size_t KeptCount(double fraction, size_t count);

struct PartProvenance {
  std::string language_code;
  size_t available = 0;
  size_t kept = 0;
  int64_t kept_tokens = 0;
};

struct MixedTreebank {
  Treebank treebank;
  // Language code of each sentence in treebank.sentences.
  std::vector<std::string> sentence_languages;
  std::vector<PartProvenance> provenance;
};

// Concatenates the parts in order. Parts listed in `downsample` keep a
// uniform, order-preserving sample of KeptCount(fraction, size) sentences.
// A sent_id already used by an earlier part is qualified as
// "<language_code>/<sent_id>". Throws ConfigError on duplicate language
// codes, fractions outside (0, 1] or fractions for absent languages.
MixedTreebank MixMultilingual(const std::vector<Treebank>& parts,
                              const std::map<std::string, double>& downsample,
                              uint64_t seed);

// Guesses the language code from a UD file name such as
// "en_ewt-ud-train.conllu". Returns an empty string if it does not match.
std::string LanguageCodeFromPath(std::string_view path);
// Guesses the split from a UD file name; defaults to train.
Split SplitFromPath(std::string_view path);

}  // namespace llmdep

#endif  // LLMDEP_TREEBANK_H_
