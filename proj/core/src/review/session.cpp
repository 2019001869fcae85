#include "coex/review/session.hpp"

#include "coex/error.hpp"

namespace coex::review {

std::string_view to_string(SessionState state) noexcept {
  switch (state) {
    case SessionState::kOpen: return "open";
    case SessionState::kApplied: return "applied";
    case SessionState::kDiscarded: return "discarded";
  }
  return "unknown";
}

ReviewSession::ReviewSession(std::string id, std::string example_id, std::string author_id)
    : id_(std::move(id)), example_id_(std::move(example_id)), author_id_(std::move(author_id)) {}

void ReviewSession::require_open(std::string_view action) const {
  if (state_ == SessionState::kApplied) {
    throw_conflict("session " + id_ + " is already applied; cannot " + std::string(action));
  }
  if (state_ != SessionState::kOpen) {
    throw_conflict("session " + id_ + " is closed; reopen it to " + std::string(action));
  }
}

void ReviewSession::require_candidate(int line, int index) const {
  if (!batch_) throw_not_found("session " + id_ + " has no generated explanations");
  auto it = batch_->candidates.find(line);
  if (it == batch_->candidates.end()) {
    throw_not_found("no candidates for line " + std::to_string(line));
  }
  if (index < 0 || index >= static_cast<int>(it->second.size())) {
    throw_not_found("no candidate " + std::to_string(index) + " on line " + std::to_string(line));
  }
}

bool ReviewSession::line_included(int line) const {
  auto it = line_included_.find(line);
  if (it == line_included_.end()) throw_not_found("no candidates for line " + std::to_string(line));
  return it->second;
}

bool ReviewSession::fragment_included(int line, int index) const {
  require_candidate(line, index);
  return fragment_included_.at({line, index});
}

bool ReviewSession::fragment_liked(int line, int index) const {
  require_candidate(line, index);
  return fragment_liked_.at({line, index});
}

void ReviewSession::attach_batch(llm::GenerationBatch batch) {
  require_open("generate");
  line_included_.clear();
  fragment_included_.clear();
  fragment_liked_.clear();
  for (const auto& [line, texts] : batch.candidates) {
    line_included_[line] = true;
    for (int i = 0; i < static_cast<int>(texts.size()); ++i) {
      fragment_included_[{line, i}] = true;
      fragment_liked_[{line, i}] = false;
    }
  }
  batch_ = std::move(batch);
  bump();
}

void ReviewSession::set_line_included(int line, bool included) {
  require_open("change marks");
  if (!batch_ || !line_included_.count(line)) {
    throw_not_found("no candidates for line " + std::to_string(line));
  }
  line_included_[line] = included;
  bump();
}

void ReviewSession::set_fragment_included(int line, int index, bool included) {
  require_open("change marks");
  require_candidate(line, index);
  fragment_included_[{line, index}] = included;
  bump();
}

bool ReviewSession::toggle_like(int line, int index) {
  require_open("change marks");
  require_candidate(line, index);
  bool& liked = fragment_liked_[{line, index}];
  liked = !liked;
  bump();
  return liked;
}

void ReviewSession::close() {
  if (state_ == SessionState::kOpen) {
    state_ = SessionState::kDiscarded;
    bump();
  }
}

void ReviewSession::reopen() {
  if (state_ == SessionState::kApplied) throw_conflict("session " + id_ + " is already applied");
  if (state_ == SessionState::kDiscarded) {
    state_ = SessionState::kOpen;
    bump();
  }
}

std::map<int, std::vector<std::pair<std::string, bool>>> ReviewSession::plan() const {
  std::map<int, std::vector<std::pair<std::string, bool>>> out;
  if (!batch_) return out;
  for (const auto& [line, texts] : batch_->candidates) {
    if (!line_included_.at(line)) continue;
    for (int i = 0; i < static_cast<int>(texts.size()); ++i) {
      if (!fragment_included_.at({line, i})) continue;
      out[line].emplace_back(texts[static_cast<std::size_t>(i)], fragment_liked_.at({line, i}));
    }
  }
  return out;
}

ApplyResult ReviewSession::apply(WorkedExample& example, TimestampMs now) {
  require_open("apply");
  if (!batch_) throw_validation("session " + id_ + " has nothing to apply; generate first");
  if (example.id() != example_id_) throw_validation("session belongs to another example");

  auto planned = plan();
  for (const auto& [line, items] : planned) {
    if (!example.line(line).explainable) {
      throw_validation("line " + std::to_string(line) + " is no longer explainable");
    }
  }

  ApplyResult result;
  for (const auto& [line, texts] : batch_->candidates) {
    result.candidates += static_cast<int>(texts.size());
    ++result.candidate_lines;
    for (int i = 0; i < static_cast<int>(texts.size()); ++i) {
      if (fragment_liked_.at({line, i})) ++result.liked;
    }
    if (!planned.count(line)) ++result.lines_fully_excluded;
  }

  WorkedExample updated = example;
  for (const auto& [line, items] : planned) {
    for (const auto& [text, liked] : items) {
      const auto& f = updated.add_fragment(line, text, Origin::kGenerated, now, liked);
      result.fragments.push_back({line, f.id, f.text, liked});
      ++result.applied_per_line[line];
    }
  }
  result.excluded = result.candidates - static_cast<int>(result.fragments.size());
  example = std::move(updated);
  state_ = SessionState::kApplied;
  bump();
  return result;
}

void ReviewSession::mark_applied() {
  state_ = SessionState::kApplied;
  bump();
}

}  // namespace coex::review
