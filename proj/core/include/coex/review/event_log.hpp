#pragma once

#include <functional>
#include <iosfwd>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "coex/review/event.hpp"

namespace coex::review {

struct EventDraft {
  std::string author_id;
  std::string example_id;
  EventKind kind;
  nlohmann::json payload = nlohmann::json::object();
};

/// Append-only, gap-free event sequence. Appends are serialized; a sink (for
/// example the ndjson writer) sees each event before it becomes visible, and
/// if the sink throws the event is not appended.
class EventLog {
 public:
  using Sink = std::function<void(const AuthoringEvent&)>;

  explicit EventLog(Clock clock = system_clock(), Sink sink = nullptr);

  /// Adopts previously persisted events. Throws Error(kIntegrity) on gaps.
  EventLog(std::vector<AuthoringEvent> existing, Clock clock, Sink sink);

  AuthoringEvent append(EventDraft draft);

  /// Immutable copy for analysis.
  std::vector<AuthoringEvent> snapshot() const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<AuthoringEvent> events_;
  Clock clock_;
  Sink sink_;
};

/// Sequences must run 1, 2, 3, ... Throws Error(kIntegrity) otherwise.
void verify_sequence(std::span<const AuthoringEvent> events);

std::string to_ndjson_line(const AuthoringEvent& event);

struct NdjsonReadResult {
  std::vector<AuthoringEvent> events;
  /// Bytes of well-formed, newline-terminated records (a crash can leave a
  /// torn final record after this offset).
  std::size_t valid_bytes = 0;
  bool truncated_tail = false;
  bool missing_final_newline = false;  // last record complete but unterminated
};

/// Reads newline-delimited events. With `tolerate_torn_tail`, an unterminated
/// unparseable last record is reported instead of thrown. Any other bad
/// record throws Error(kIntegrity).
NdjsonReadResult read_ndjson(std::istream& in, bool tolerate_torn_tail = false);

}  // namespace coex::review
