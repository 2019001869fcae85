#include "coex/review/engine.hpp"

#include "coex/error.hpp"

namespace coex::review {

ReviewEngine::ReviewEngine(EventLog& log, std::shared_ptr<IdGenerator> ids, Clock clock)
    : log_(log), ids_(std::move(ids)), clock_(std::move(clock)) {}

ReviewSession& ReviewEngine::find(const std::string& session_id) {
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw_not_found("unknown session '" + session_id + "'");
  return it->second;
}

AuthoringEvent ReviewEngine::log_event(const std::string& author, const std::string& example_id,
                                       EventKind kind, nlohmann::json payload) {
  return log_.append({author, example_id, kind, std::move(payload)});
}

ReviewEngine::Opened ReviewEngine::open_dialog(const std::string& author,
                                               const WorkedExample& example) {
  std::lock_guard lock(mutex_);
  ReviewSession* target = nullptr;
  bool resumed = false;
  auto& ids = by_example_[example.id()];
  if (!ids.empty()) {
    ReviewSession& last = sessions_.at(ids.back());
    if (last.state() != SessionState::kApplied) {
      target = &last;
      resumed = true;
    }
  }
  if (!target) {
    std::string id = ids_->next("ses");
    auto [it, inserted] = sessions_.emplace(id, ReviewSession(id, example.id(), author));
    ids.push_back(id);
    target = &it->second;
  }
  // Log before changing state so a failed append leaves the session as it was.
  auto event = log_event(author, example.id(), EventKind::kDialogOpened,
                         {{"session_id", target->id()}, {"resumed", resumed}});
  target->reopen();
  return {*target, std::move(event), resumed};
}

AuthoringEvent ReviewEngine::close_dialog(const std::string& author,
                                          const std::string& session_id) {
  std::lock_guard lock(mutex_);
  ReviewSession& s = find(session_id);
  const bool was_open = s.state() == SessionState::kOpen;
  auto event = log_event(author, s.example_id(), EventKind::kDialogClosed,
                         {{"session_id", session_id},
                          {"state_before", to_string(s.state())},
                          {"changed", was_open}});
  s.close();
  return event;
}

AuthoringEvent ReviewEngine::record_generation(const std::string& author,
                                               const std::string& session_id,
                                               llm::GenerationBatch batch) {
  std::lock_guard lock(mutex_);
  ReviewSession& s = find(session_id);
  ReviewSession staged = s;
  nlohmann::json per_line = nlohmann::json::object();
  for (const auto& [line, texts] : batch.candidates) per_line[std::to_string(line)] = texts.size();
  nlohmann::json payload = {{"session_id", session_id},
                            {"batch_id", batch.id},
                            {"candidates", batch.candidate_count()},
                            {"lines", batch.candidates.size()},
                            {"per_line", per_line},
                            {"model", batch.request.model},
                            {"temperature", batch.request.temperature},
                            {"parse_failed", batch.parse_failed},
                            {"warnings", batch.warnings.size()}};
  staged.attach_batch(std::move(batch));
  auto event = log_event(author, s.example_id(), EventKind::kGenerated, std::move(payload));
  s = std::move(staged);
  return event;
}

AuthoringEvent ReviewEngine::set_line_included(const std::string& author,
                                               const std::string& session_id, int line,
                                               bool included) {
  std::lock_guard lock(mutex_);
  ReviewSession& s = find(session_id);
  ReviewSession staged = s;
  staged.set_line_included(line, included);
  auto event = log_event(author, s.example_id(),
                         included ? EventKind::kLineIncluded : EventKind::kLineExcluded,
                         {{"session_id", session_id}, {"line", line}});
  s = std::move(staged);
  return event;
}

AuthoringEvent ReviewEngine::set_fragment_included(const std::string& author,
                                                   const std::string& session_id, int line,
                                                   int index, bool included) {
  std::lock_guard lock(mutex_);
  ReviewSession& s = find(session_id);
  ReviewSession staged = s;
  staged.set_fragment_included(line, index, included);
  auto event = log_event(author, s.example_id(),
                         included ? EventKind::kFragmentIncluded : EventKind::kFragmentExcluded,
                         {{"session_id", session_id}, {"line", line}, {"index", index}});
  s = std::move(staged);
  return event;
}

AuthoringEvent ReviewEngine::toggle_like(const std::string& author,
                                         const std::string& session_id, int line, int index) {
  std::lock_guard lock(mutex_);
  ReviewSession& s = find(session_id);
  ReviewSession staged = s;
  const bool liked = staged.toggle_like(line, index);
  auto event = log_event(author, s.example_id(), EventKind::kFragmentLiked,
                         {{"session_id", session_id},
                          {"line", line},
                          {"index", index},
                          {"liked", liked}});
  s = std::move(staged);
  return event;
}

ReviewEngine::Applied ReviewEngine::apply(
    const std::string& author, const std::string& session_id, WorkedExample& example,
    const std::function<void(const WorkedExample&)>& persist) {
  std::lock_guard lock(mutex_);
  ReviewSession& s = find(session_id);
  ReviewSession staged = s;
  WorkedExample updated = example;
  ApplyResult result = staged.apply(updated, clock_());

  nlohmann::json lines = nlohmann::json::object();
  for (const auto& [line, count] : result.applied_per_line) lines[std::to_string(line)] = count;
  nlohmann::json fragments = nlohmann::json::array();
  for (const auto& f : result.fragments) {
    fragments.push_back(
        {{"line", f.line}, {"fragment_id", f.fragment_id}, {"text", f.text}, {"liked", f.liked}});
  }
  nlohmann::json payload = {{"session_id", session_id},
                            {"batch_id", staged.batch()->id},
                            {"candidates", result.candidates},
                            {"candidate_lines", result.candidate_lines},
                            {"applied", result.fragments.size()},
                            {"excluded", result.excluded},
                            {"liked", result.liked},
                            {"lines_fully_excluded", result.lines_fully_excluded},
                            {"applied_per_line", lines},
                            {"fragments", fragments},
                            {"example_version", updated.version()}};

  // persist stages the document; the appended event is the commit point.
  if (persist) persist(updated);
  auto event = log_event(author, example.id(), EventKind::kExplanationsUsed, std::move(payload));
  example = std::move(updated);
  s = std::move(staged);
  return {std::move(result), std::move(event)};
}

ReviewSession ReviewEngine::session(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw_not_found("unknown session '" + session_id + "'");
  return it->second;
}

std::vector<ReviewSession> ReviewEngine::sessions_for(const std::string& example_id) const {
  std::lock_guard lock(mutex_);
  std::vector<ReviewSession> out;
  auto it = by_example_.find(example_id);
  if (it == by_example_.end()) return out;
  for (const auto& id : it->second) out.push_back(sessions_.at(id));
  return out;
}

void ReviewEngine::forget_example(const std::string& example_id) {
  std::lock_guard lock(mutex_);
  auto it = by_example_.find(example_id);
  if (it == by_example_.end()) return;
  for (const auto& id : it->second) sessions_.erase(id);
  by_example_.erase(it);
}

void ReviewEngine::replay(const std::vector<AuthoringEvent>& events,
                          const BatchLoader& load_batch) {
  std::lock_guard lock(mutex_);
  sessions_.clear();
  by_example_.clear();
  auto session_of = [&](const AuthoringEvent& e) -> ReviewSession* {
    auto it = sessions_.find(e.payload.value("session_id", std::string{}));
    return it == sessions_.end() ? nullptr : &it->second;
  };
  for (const auto& e : events) {
    try {
      switch (e.kind) {
        case EventKind::kDialogOpened: {
          const std::string id = e.payload.at("session_id").get<std::string>();
          auto it = sessions_.find(id);
          if (it == sessions_.end()) {
            sessions_.emplace(id, ReviewSession(id, e.example_id, e.author_id));
            by_example_[e.example_id].push_back(id);
          } else {
            it->second.reopen();
          }
          break;
        }
        case EventKind::kDialogClosed:
          if (auto* s = session_of(e)) s->close();
          break;
        case EventKind::kGenerated:
          if (auto* s = session_of(e)) {
            auto batch = load_batch(e.payload.at("batch_id").get<std::string>());
            if (batch) s->attach_batch(std::move(*batch));
          }
          break;
        case EventKind::kLineIncluded:
        case EventKind::kLineExcluded:
          if (auto* s = session_of(e)) {
            s->set_line_included(e.payload.at("line").get<int>(),
                                 e.kind == EventKind::kLineIncluded);
          }
          break;
        case EventKind::kFragmentIncluded:
        case EventKind::kFragmentExcluded:
          if (auto* s = session_of(e)) {
            s->set_fragment_included(e.payload.at("line").get<int>(),
                                     e.payload.at("index").get<int>(),
                                     e.kind == EventKind::kFragmentIncluded);
          }
          break;
        case EventKind::kFragmentLiked:
          if (auto* s = session_of(e)) {
            const int line = e.payload.at("line").get<int>();
            const int index = e.payload.at("index").get<int>();
            if (s->fragment_liked(line, index) != e.payload.value("liked", true)) {
              s->toggle_like(line, index);
            }
          }
          break;
        case EventKind::kExplanationsUsed:
          if (auto* s = session_of(e)) s->mark_applied();
          break;
        case EventKind::kExampleDeleted: {
          auto it = by_example_.find(e.example_id);
          if (it != by_example_.end()) {
            for (const auto& id : it->second) sessions_.erase(id);
            by_example_.erase(it);
          }
          break;
        }
        default:
          break;
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorKind::kIntegrity, "event " + std::to_string(e.sequence) +
                                             " cannot be replayed: " + ex.what());
    } catch (const Error& ex) {
      throw Error(ErrorKind::kIntegrity, "event " + std::to_string(e.sequence) +
                                             " cannot be replayed: " + ex.what());
    }
  }
}

}  // namespace coex::review
