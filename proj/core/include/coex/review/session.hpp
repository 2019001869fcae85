#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coex/example.hpp"
#include "coex/llm/gateway.hpp"

namespace coex::review {

enum class SessionState { kOpen, kApplied, kDiscarded };

std::string_view to_string(SessionState state) noexcept;

/// (line number, candidate index within that line)
using CandidateKey = std::pair<int, int>;

struct AppliedFragment {
  int line = 0;
  std::string fragment_id;
  std::string text;
  bool liked = false;
};

struct ApplyResult {
  std::map<int, int> applied_per_line;  // only lines that gained fragments
  std::vector<AppliedFragment> fragments;
  int candidates = 0;       // in the batch
  int candidate_lines = 0;  // lines with candidates in the batch
  int excluded = 0;         // candidates not applied (line or fragment excluded)
  int liked = 0;            // liked candidates, applied or not
  int lines_fully_excluded = 0;
};

/// Review pass over one generation dialog. Marks default to included / not
/// liked and exist only for candidates of the attached batch. A closed
/// (discarded) session can be reopened; applied is terminal.
class ReviewSession {
 public:
  ReviewSession(std::string id, std::string example_id, std::string author_id);

  const std::string& id() const noexcept { return id_; }
  const std::string& example_id() const noexcept { return example_id_; }
  const std::string& author_id() const noexcept { return author_id_; }
  SessionState state() const noexcept { return state_; }
  std::int64_t version() const noexcept { return version_; }
  const std::optional<llm::GenerationBatch>& batch() const noexcept { return batch_; }

  bool line_included(int line) const;
  bool fragment_included(int line, int index) const;
  bool fragment_liked(int line, int index) const;

  /// Replaces any previous batch and resets every mark.
  void attach_batch(llm::GenerationBatch batch);
  void set_line_included(int line, bool included);
  void set_fragment_included(int line, int index, bool included);
  /// Returns the new liked value.
  bool toggle_like(int line, int index);

  /// No-op unless open.
  void close();
  /// Discarded -> open. Throws Error(kConflict) if applied.
  void reopen();

  /// Candidates that apply() would add, per line, in candidate order.
  std::map<int, std::vector<std::pair<std::string, bool>>> plan() const;

  /// Appends included candidates of included lines to `example` as generated
  /// fragments (likes copied) and moves to kApplied. Validates everything
  /// before touching `example`.
  ApplyResult apply(WorkedExample& example, TimestampMs now);

  /// Marks the session applied without touching an example (log replay).
  void mark_applied();

 private:
  void require_open(std::string_view action) const;
  void require_candidate(int line, int index) const;
  void bump() { ++version_; }

  std::string id_;
  std::string example_id_;
  std::string author_id_;
  SessionState state_ = SessionState::kOpen;
  std::int64_t version_ = 1;
  std::optional<llm::GenerationBatch> batch_;
  std::map<int, bool> line_included_;
  std::map<CandidateKey, bool> fragment_included_;
  std::map<CandidateKey, bool> fragment_liked_;
};

}  // namespace coex::review
