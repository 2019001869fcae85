#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "coex/example.hpp"
#include "coex/ids.hpp"
#include "coex/llm/gateway.hpp"
#include "coex/review/event_log.hpp"
#include "coex/review/session.hpp"

namespace coex::review {

/// Generation-dialog state machine. Every operation appends exactly one
/// event describing it; sessions can be rebuilt from those events.
class ReviewEngine {
 public:
  ReviewEngine(EventLog& log, std::shared_ptr<IdGenerator> ids, Clock clock = system_clock());

  struct Opened {
    ReviewSession session;
    AuthoringEvent event;
    bool resumed = false;
  };

  /// Resumes the example's most recent closed session if there is one,
  /// otherwise starts a new session.
  Opened open_dialog(const std::string& author, const WorkedExample& example);

  /// Closing is non-destructive: the session stays resumable. Closing an
  /// applied or already-closed session changes nothing but is still logged.
  AuthoringEvent close_dialog(const std::string& author, const std::string& session_id);

  /// Attaches a batch to an open session and logs `generated`.
  AuthoringEvent record_generation(const std::string& author, const std::string& session_id,
                                   llm::GenerationBatch batch);

  AuthoringEvent set_line_included(const std::string& author, const std::string& session_id,
                                   int line, bool included);
  AuthoringEvent set_fragment_included(const std::string& author,
                                       const std::string& session_id, int line, int index,
                                       bool included);
  AuthoringEvent toggle_like(const std::string& author, const std::string& session_id, int line,
                             int index);

  struct Applied {
    ApplyResult result;
    AuthoringEvent event;
  };

  /// `persist` receives the updated example before the event is appended; if
  /// it throws, neither the example, the session nor the log change. The
  /// event payload carries the resulting example_version.
  Applied apply(const std::string& author, const std::string& session_id,
                WorkedExample& example,
                const std::function<void(const WorkedExample&)>& persist = nullptr);

  ReviewSession session(const std::string& session_id) const;
  std::vector<ReviewSession> sessions_for(const std::string& example_id) const;
  void forget_example(const std::string& example_id);

  using BatchLoader = std::function<std::optional<llm::GenerationBatch>(const std::string&)>;

  /// Rebuilds session state from a log (after restart). Events are not
  /// re-appended.
  void replay(const std::vector<AuthoringEvent>& events, const BatchLoader& load_batch);

 private:
  ReviewSession& find(const std::string& session_id);
  AuthoringEvent log_event(const std::string& author, const std::string& example_id,
                           EventKind kind, nlohmann::json payload);

  mutable std::mutex mutex_;
  EventLog& log_;
  std::shared_ptr<IdGenerator> ids_;
  Clock clock_;
  std::map<std::string, ReviewSession> sessions_;
  std::map<std::string, std::vector<std::string>> by_example_;  // creation order
};

}  // namespace coex::review
