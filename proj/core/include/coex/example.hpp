#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coex/segmenter.hpp"
#include "coex/time.hpp"

namespace coex {

enum class Origin { kGenerated, kHuman };

std::string_view to_string(Origin origin) noexcept;
std::optional<Origin> parse_origin(std::string_view name) noexcept;

struct ExplanationFragment {
  std::string id;
  int position = 0;  // 0 is the default-displayed fragment
  std::string text;
  Origin origin = Origin::kHuman;
  std::optional<std::string> original_text;  // set once for generated fragments
  bool liked = false;
  int edit_count = 0;

  friend bool operator==(const ExplanationFragment&, const ExplanationFragment&) = default;
};

struct CodeLine {
  int number = 0;
  std::string text;
  LineKind kind = LineKind::kCode;
  bool explainable = true;
  std::vector<ExplanationFragment> fragments;  // ordered by position

  friend bool operator==(const CodeLine&, const CodeLine&) = default;
};

struct ProvenanceSummary {
  std::string fragment_id;
  int line_number = 0;
  Origin origin = Origin::kHuman;
  double levenshtein_ratio = 1.0;  // 1.0 for human fragments
};

/// Plain field bag behind WorkedExample. Used for persistence and import;
/// WorkedExample::from_data validates it.
struct ExampleData {
  std::string id;
  std::string title;
  std::string problem;
  Language language = Language::kJava;
  std::vector<CodeLine> lines;
  std::int64_t version = 1;
  TimestampMs created_at = 0;
  TimestampMs updated_at = 0;
  std::int64_t next_fragment_seq = 1;

  friend bool operator==(const ExampleData&, const ExampleData&) = default;
};

/// A problem statement, its segmented code, and ordered explanation fragments
/// per line. Every mutation bumps `version` and refreshes `updated_at`, and
/// leaves the aggregate untouched if it throws.
class WorkedExample {
 public:
  static WorkedExample create(std::string id, std::string title, std::string problem,
                              Language language, std::string_view source, TimestampMs now);

  /// Throws Error(kValidation) when `data` violates an aggregate invariant.
  static WorkedExample from_data(ExampleData data);

  const ExampleData& data() const noexcept { return data_; }
  const std::string& id() const noexcept { return data_.id; }
  const std::string& title() const noexcept { return data_.title; }
  const std::string& problem() const noexcept { return data_.problem; }
  Language language() const noexcept { return data_.language; }
  std::int64_t version() const noexcept { return data_.version; }
  const std::vector<CodeLine>& lines() const noexcept { return data_.lines; }

  /// Line texts joined with '\n'.
  std::string source() const;

  const CodeLine& line(int number) const;
  const ExplanationFragment& fragment(std::string_view fragment_id) const;
  int line_of(std::string_view fragment_id) const;
  std::vector<int> explainable_lines() const;
  std::size_t fragment_count() const noexcept;

  void update_details(std::string title, std::string problem, TimestampMs now);

  /// Re-segments new code. Fragments stay attached to their line numbers;
  /// throws if a line carrying fragments would disappear or stop being
  /// explainable.
  void replace_source(std::string_view source, TimestampMs now);

  /// Instructor override of the segmenter's explainable flag. A line with
  /// fragments cannot be made non-explainable.
  const CodeLine& set_explainable(int line_number, bool explainable, TimestampMs now);

  const ExplanationFragment& add_fragment(int line_number, std::string text, Origin origin,
                                          TimestampMs now, bool liked = false);

  /// edit_count grows only if the text actually changes; version always bumps.
  const ExplanationFragment& edit_fragment(std::string_view fragment_id, std::string new_text,
                                           TimestampMs now);

  const CodeLine& remove_fragment(std::string_view fragment_id, TimestampMs now);

  /// `order` must be exactly the line's fragment ids.
  const CodeLine& reorder_fragments(int line_number, std::span<const std::string> order,
                                    TimestampMs now);

  /// Appends second's text to first's (joined by `separator`) and removes
  /// second. The result is generated if either input was.
  const ExplanationFragment& merge_fragments(int line_number, std::string_view first_id,
                                             std::string_view second_id,
                                             std::string_view separator, TimestampMs now);

  const ExplanationFragment& set_liked(std::string_view fragment_id, bool liked, TimestampMs now);

  std::vector<ProvenanceSummary> provenance() const;

 private:
  explicit WorkedExample(ExampleData data) : data_(std::move(data)) {}

  CodeLine& mutable_line(int number);
  std::pair<CodeLine*, std::size_t> locate(std::string_view fragment_id);
  void touch(TimestampMs now);

  ExampleData data_;
};

/// Mean of a provenance list's ratios; 1.0 for an empty list.
double mean_ratio(std::span<const ProvenanceSummary> rows);

}  // namespace coex
