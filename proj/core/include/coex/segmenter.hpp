#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coex {

enum class Language { kJava, kPython };

std::string_view to_string(Language language) noexcept;
std::optional<Language> parse_language(std::string_view name) noexcept;

enum class LineKind { kCode, kBlank, kComment, kDelimiterOnly };

std::string_view to_string(LineKind kind) noexcept;
std::optional<LineKind> parse_line_kind(std::string_view name) noexcept;

/// explainable is true exactly for kCode.
struct LineClass {
  LineKind kind = LineKind::kCode;
  bool explainable = true;

  friend bool operator==(const LineClass&, const LineClass&) = default;
};

struct ClassifyResult {
  LineClass line_class;
  bool in_block_comment = false;  // state to thread into the next line
};

struct SegmentedLine {
  int number = 0;  // 1-based
  std::string text;
  LineClass line_class;
};

namespace segment {

/// Splits on '\n' only. "a\n" yields {"a", ""}; "" yields {""}.
std::vector<std::string> split_lines(std::string_view source);

/// Inverse of split_lines.
std::string join_lines(std::span<const std::string> lines);

/// Classifies a single line given the block-comment state left by the line
/// before it. Java block comments and Python statement-level triple-quoted
/// strings both count as comment runs. A line that mixes code with a trailing
/// comment is code.
ClassifyResult classify_line(std::string_view text, Language language, bool in_block_comment);

/// split_lines + classify_line with the block-comment state threaded through.
std::vector<SegmentedLine> segment_source(std::string_view source, Language language);

/// Ascending line numbers whose class is explainable.
std::vector<int> explainable_lines(std::span<const SegmentedLine> lines);

}  // namespace segment
}  // namespace coex
