#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coex/review/event.hpp"

namespace coex::review {

struct AnalyzeOptions {
  /// Close-reopen pairs are bucketed by the smallest threshold (seconds)
  /// not below their interval; intervals above the largest are ignored.
  std::vector<double> close_reopen_thresholds_s{5.0, 12.0};
};

struct CloseReopenBucket {
  double threshold_s = 0.0;
  std::size_t count = 0;
};

/// One column of the authoring report. "Generated" figures refer to
/// generated (LLM) fragments only; human-written fragments are counted
/// separately.
struct AuthorStats {
  // counts
  std::size_t examples_created = 0;
  std::size_t dialogs_opened = 0;
  std::size_t generations = 0;
  std::size_t sessions_applied = 0;
  std::size_t candidates_total = 0;       // over every generation
  std::size_t candidate_lines_total = 0;  // over every generation
  std::size_t generated = 0;              // candidates of applied sessions
  std::size_t lines_explained = 0;        // candidate lines of applied sessions
  std::size_t excluded = 0;
  std::size_t liked = 0;
  std::size_t lines_fully_excluded = 0;
  std::size_t edited = 0;       // distinct generated fragments with >= 1 text change
  std::size_t edit_events = 0;  // text changes on generated fragments
  std::size_t removed = 0;      // generated fragments removed after apply
  std::size_t merged = 0;       // merge operations
  std::size_t human_added = 0;
  std::size_t human_removed = 0;
  std::size_t exported = 0;
  std::vector<CloseReopenBucket> close_reopen;
  std::size_t close_reopen_total = 0;

  // derived
  double avg_fragments_per_line = 0.0;          // candidates_total / candidate_lines_total
  double avg_fragments_per_line_applied = 0.0;  // generated / lines_explained
  double excluded_pct = 0.0;                    // of generated
  double liked_pct = 0.0;
  double edited_pct = 0.0;
  double removed_pct = 0.0;
  double avg_edits_per_edited_fragment = 0.0;
  double stdev_edits_per_edited_fragment = 0.0;  // sample (n - 1)
  /// Mean ratio(original, current) over this author's surviving generated
  /// fragments; absent when there are none.
  std::optional<double> avg_levenshtein_ratio;
  std::size_t ratio_fragments = 0;
};

struct AuthoringReport {
  std::map<std::string, AuthorStats> authors;
  /// Count columns are sums over authors. Ratio is the unweighted mean of the
  /// author means (1.0 if no author has generated fragments).
  AuthorStats total;
  double avg_levenshtein_ratio = 1.0;
  double avg_levenshtein_ratio_weighted = 1.0;  // pooled over fragments
  std::size_t events = 0;
  std::vector<double> thresholds_s;
};

/// Pure fold over the log. Throws Error(kIntegrity) on sequence gaps or
/// payloads missing required fields.
AuthoringReport analyze(std::span<const AuthoringEvent> log, const AnalyzeOptions& options = {});

/// Unweighted mean of per-author ratios; 1.0 for none.
double aggregate_author_ratios(std::span<const double> author_means);

nlohmann::json to_json(const AuthoringReport& report);
std::string to_text(const AuthoringReport& report);

}  // namespace coex::review
