#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace coex::metrics {

/// Concatenates explanations in line order, fragments in position order,
/// separated by single spaces. Fragments lacking terminal punctuation get a
/// trailing '.'.
std::string merge_source_document(const std::map<int, std::vector<std::string>>& explanations);

struct TokenizedText {
  std::string raw;
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> tokens;  // all sentence tokens, in order
  std::vector<int> syllable_counts;  // parallel to tokens, each >= 1
};

/// Rules (versioned as "tokenizer-v1"):
///  - a sentence ends at '.', '!' or '?' followed by whitespace or end of text;
///    sentences without word tokens are dropped
///  - tokens are maximal runs of letters, digits, apostrophes and non-ASCII
///    bytes, lowercased, with leading/trailing apostrophes stripped
///  - syllables: see count_syllables
TokenizedText tokenize(std::string_view text);

/// Vowel-group heuristic over a lowercase token: count runs of [aeiouy],
/// drop a lone silent trailing 'e' unless the word ends in consonant + "le",
/// never below 1.
int count_syllables(std::string_view word);

inline constexpr std::string_view kTokenizerVersion = "tokenizer-v1";

/// Function-word list used for lexical density.
class StopwordList {
 public:
  /// The list compiled in from data/stopwords.txt.
  static std::shared_ptr<const StopwordList> builtin();

  /// One word per line; blank lines and '#' comments ignored.
  static std::shared_ptr<const StopwordList> parse(std::string_view text, std::string version);
  static std::shared_ptr<const StopwordList> load_file(const std::string& path);

  bool contains(std::string_view word) const;
  std::size_t size() const noexcept { return words_.size(); }
  const std::string& version() const noexcept { return version_; }
  /// "fnv1a64:<hex>" over the sorted word list, for report metadata.
  const std::string& digest() const noexcept { return digest_; }

 private:
  std::unordered_set<std::string> words_;
  std::string version_;
  std::string digest_;
};

std::size_t vocabulary(const TokenizedText& text);

/// Share of tokens not in `stopwords`. Throws Error(kValidation) for 0 tokens.
double lexical_density(const TokenizedText& text, const StopwordList& stopwords);

struct Readability {
  double gunning_fog = 0.0;
  double flesch_reading_ease = 0.0;
  double flesch_kincaid = 0.0;
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t syllables = 0;
  std::size_t complex_words = 0;  // >= 3 syllables
};

/// Throws Error(kValidation) when there are no sentences or no words.
Readability readability(const TokenizedText& text);

/// FNV-1a 64-bit, hex encoded.
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace coex::metrics
