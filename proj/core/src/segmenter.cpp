#include "coex/segmenter.hpp"

#include <algorithm>

namespace coex {

std::string_view to_string(Language language) noexcept {
  switch (language) {
    case Language::kJava: return "java";
    case Language::kPython: return "python";
  }
  return "unknown";
}

std::optional<Language> parse_language(std::string_view name) noexcept {
  if (name == "java") return Language::kJava;
  if (name == "python") return Language::kPython;
  return std::nullopt;
}

std::string_view to_string(LineKind kind) noexcept {
  switch (kind) {
    case LineKind::kCode: return "code";
    case LineKind::kBlank: return "blank";
    case LineKind::kComment: return "comment";
    case LineKind::kDelimiterOnly: return "delimiter_only";
  }
  return "unknown";
}

std::optional<LineKind> parse_line_kind(std::string_view name) noexcept {
  if (name == "code") return LineKind::kCode;
  if (name == "blank") return LineKind::kBlank;
  if (name == "comment") return LineKind::kComment;
  if (name == "delimiter_only") return LineKind::kDelimiterOnly;
  return std::nullopt;
}

namespace segment {
namespace {

constexpr std::string_view kDelimiters = "{}();,";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

bool starts_with_at(std::string_view s, std::size_t i, std::string_view token) {
  return s.substr(i, token.size()) == token;
}

// Skips a single-line string literal starting at s[i] (the opening quote).
// Returns the index one past the closing quote, or s.size() if unterminated.
std::size_t skip_string(std::string_view s, std::size_t i) {
  const char quote = s[i];
  for (std::size_t j = i + 1; j < s.size(); ++j) {
    if (s[j] == '\\') {
      ++j;
    } else if (s[j] == quote) {
      return j + 1;
    }
  }
  return s.size();
}

// Everything outside comments that is not whitespace lands in `residue`;
// string literal contents are replaced by a single marker so they count as code.
struct Scan {
  std::string residue;
  bool in_block = false;
};

Scan scan_java(std::string_view s, bool in_block) {
  Scan out;
  out.in_block = in_block;
  std::size_t i = 0;
  while (i < s.size()) {
    if (out.in_block) {
      std::size_t close = s.find("*/", i);
      if (close == std::string_view::npos) return out;
      out.in_block = false;
      i = close + 2;
      continue;
    }
    char c = s[i];
    if (starts_with_at(s, i, "//")) return out;
    if (starts_with_at(s, i, "/*")) {
      out.in_block = true;
      i += 2;
      continue;
    }
    if (c == '"' || c == '\'') {
      out.residue += '"';
      i = skip_string(s, i);
      continue;
    }
    if (!is_space(c)) out.residue += c;
    ++i;
  }
  return out;
}

std::size_t find_triple(std::string_view s, std::size_t from) {
  std::size_t a = s.find("\"\"\"", from);
  std::size_t b = s.find("'''", from);
  return std::min(a, b);
}

Scan scan_python(std::string_view s, bool in_block) {
  Scan out;
  out.in_block = in_block;
  std::size_t i = 0;
  while (i < s.size()) {
    if (out.in_block) {
      // The threaded state is a single flag, so either triple-quote style
      // closes the run.
      std::size_t close = find_triple(s, i);
      if (close == std::string_view::npos) return out;
      out.in_block = false;
      i = close + 3;
      continue;
    }
    char c = s[i];
    if (c == '#') return out;
    bool triple = starts_with_at(s, i, "\"\"\"") || starts_with_at(s, i, "'''");
    if (triple && out.residue.empty()) {
      std::size_t close = s.find(s.substr(i, 3), i + 3);
      if (close == std::string_view::npos) {
        out.in_block = true;
        return out;
      }
      i = close + 3;
      continue;
    }
    if (triple) {
      // Triple-quoted string inside an expression is code; continuation
      // lines are classified on their own content.
      out.residue += '"';
      std::size_t close = s.find(s.substr(i, 3), i + 3);
      i = close == std::string_view::npos ? s.size() : close + 3;
      continue;
    }
    if (c == '"' || c == '\'') {
      out.residue += '"';
      i = skip_string(s, i);
      continue;
    }
    if (!is_space(c)) out.residue += c;
    ++i;
  }
  return out;
}

}  // namespace

std::vector<std::string> split_lines(std::string_view source) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    std::size_t nl = source.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(source.substr(start));
      break;
    }
    lines.emplace_back(source.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string join_lines(std::span<const std::string> lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

ClassifyResult classify_line(std::string_view text, Language language, bool in_block_comment) {
  Scan scan = language == Language::kJava ? scan_java(text, in_block_comment)
                                          : scan_python(text, in_block_comment);
  ClassifyResult result;
  result.in_block_comment = scan.in_block;

  bool blank = std::all_of(text.begin(), text.end(), is_space);
  if (blank) {
    result.line_class = {LineKind::kBlank, false};
  } else if (scan.residue.empty()) {
    result.line_class = {LineKind::kComment, false};
  } else if (scan.residue.find_first_not_of(kDelimiters) == std::string::npos) {
    result.line_class = {LineKind::kDelimiterOnly, false};
  } else {
    result.line_class = {LineKind::kCode, true};
  }
  return result;
}

std::vector<SegmentedLine> segment_source(std::string_view source, Language language) {
  std::vector<SegmentedLine> out;
  bool in_block = false;
  int number = 0;
  for (auto& text : split_lines(source)) {
    ClassifyResult r = classify_line(text, language, in_block);
    in_block = r.in_block_comment;
    out.push_back({++number, std::move(text), r.line_class});
  }
  return out;
}

std::vector<int> explainable_lines(std::span<const SegmentedLine> lines) {
  std::vector<int> numbers;
  for (const auto& line : lines) {
    if (line.line_class.explainable) numbers.push_back(line.number);
  }
  return numbers;
}

}  // namespace segment
}  // namespace coex
