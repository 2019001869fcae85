#include "coex/metrics/text.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "coex/error.hpp"
#include "stopwords_data.hpp"

namespace coex::metrics {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '\'' || c >= 0x80;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_consonant(char c) { return is_ascii_letter(c) && !is_vowel(c); }

std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_char(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_word_char(static_cast<unsigned char>(s[j]))) ++j;
    std::string_view run = s.substr(i, j - i);
    std::size_t b = run.find_first_not_of('\'');
    if (b != std::string_view::npos) {
      std::size_t e = run.find_last_not_of('\'');
      std::string token(run.substr(b, e - b + 1));
      for (char& c : token) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
      out.push_back(std::move(token));
    }
    i = j;
  }
  return out;
}

}  // namespace

std::string merge_source_document(const std::map<int, std::vector<std::string>>& explanations) {
  std::string doc;
  for (const auto& [line, fragments] : explanations) {
    for (const auto& raw : fragments) {
      std::size_t b = raw.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) continue;
      std::size_t e = raw.find_last_not_of(" \t\r\n");
      std::string text = raw.substr(b, e - b + 1);
      char last = text.back();
      if (last != '.' && last != '!' && last != '?') text += '.';
      if (!doc.empty()) doc += ' ';
      doc += text;
    }
  }
  return doc;
}

int count_syllables(std::string_view word) {
  int groups = 0;
  bool in_group = false;
  for (char c : word) {
    bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  const std::size_t n = word.size();
  if (n >= 2 && word[n - 1] == 'e' && !is_vowel(word[n - 2])) {
    bool consonant_le = n >= 3 && word[n - 2] == 'l' && is_consonant(word[n - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  out.raw = std::string(text);
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    auto tokens = word_tokens(text.substr(start, end - start));
    if (!tokens.empty()) out.sentences.push_back(std::move(tokens));
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 == text.size() || is_space(static_cast<unsigned char>(text[i + 1]))) {
      flush(i + 1);
      start = i + 1;
    }
  }
  if (start < text.size()) flush(text.size());
  for (const auto& sentence : out.sentences) {
    for (const auto& token : sentence) {
      out.tokens.push_back(token);
      out.syllable_counts.push_back(count_syllables(token));
    }
  }
  return out;
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::shared_ptr<const StopwordList> StopwordList::builtin() {
  static const auto list = parse(detail::kStopwordsText, detail::kStopwordsVersion);
  return list;
}

std::shared_ptr<const StopwordList> StopwordList::parse(std::string_view text,
                                                        std::string version) {
  auto list = std::make_shared<StopwordList>();
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    std::string word = line.substr(b, e - b + 1);
    for (char& c : word) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    list->words_.insert(std::move(word));
  }
  std::vector<std::string> sorted(list->words_.begin(), list->words_.end());
  std::sort(sorted.begin(), sorted.end());
  std::string joined;
  for (const auto& w : sorted) {
    joined += w;
    joined += '\n';
  }
  list->version_ = std::move(version);
  list->digest_ = "fnv1a64:" + fnv1a64_hex(joined);
  return list;
}

std::shared_ptr<const StopwordList> StopwordList::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read stopword file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), "file:" + path);
}

bool StopwordList::contains(std::string_view word) const {
  return words_.count(std::string(word)) > 0;
}

std::size_t vocabulary(const TokenizedText& text) {
  std::unordered_set<std::string_view> distinct(text.tokens.begin(), text.tokens.end());
  return distinct.size();
}

double lexical_density(const TokenizedText& text, const StopwordList& stopwords) {
  if (text.tokens.empty()) throw_validation("lexical density is undefined for empty text");
  std::size_t content = 0;
  for (const auto& token : text.tokens) {
    if (!stopwords.contains(token)) ++content;
  }
  return static_cast<double>(content) / static_cast<double>(text.tokens.size());
}

Readability readability(const TokenizedText& text) {
  if (text.sentences.empty() || text.tokens.empty()) {
    throw_validation("readability needs at least one sentence and one word");
  }
  Readability r;
  r.words = text.tokens.size();
  r.sentences = text.sentences.size();
  for (int s : text.syllable_counts) {
    r.syllables += static_cast<std::size_t>(s);
    if (s >= 3) ++r.complex_words;
  }
  const double words_per_sentence = static_cast<double>(r.words) / static_cast<double>(r.sentences);
  const double syllables_per_word = static_cast<double>(r.syllables) / static_cast<double>(r.words);
  const double complex_share = static_cast<double>(r.complex_words) / static_cast<double>(r.words);
  r.flesch_reading_ease = 206.835 - 1.015 * words_per_sentence - 84.6 * syllables_per_word;
  r.flesch_kincaid = 0.39 * words_per_sentence + 11.8 * syllables_per_word - 15.59;
  r.gunning_fog = 0.4 * (words_per_sentence + 100.0 * complex_share);
  return r;
}

}  // namespace coex::metrics
