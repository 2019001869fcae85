#include "coex/review/event_log.hpp"

#include <istream>
#include <iterator>

#include "coex/error.hpp"

namespace coex::review {

EventLog::EventLog(Clock clock, Sink sink) : clock_(std::move(clock)), sink_(std::move(sink)) {}

EventLog::EventLog(std::vector<AuthoringEvent> existing, Clock clock, Sink sink)
    : events_(std::move(existing)), clock_(std::move(clock)), sink_(std::move(sink)) {
  verify_sequence(events_);
}

AuthoringEvent EventLog::append(EventDraft draft) {
  std::lock_guard lock(mutex_);
  AuthoringEvent event;
  event.sequence = static_cast<std::int64_t>(events_.size()) + 1;
  event.author_id = std::move(draft.author_id);
  event.example_id = std::move(draft.example_id);
  event.kind = draft.kind;
  event.payload = std::move(draft.payload);
  event.timestamp = clock_();
  if (!events_.empty() && event.timestamp < events_.back().timestamp) {
    event.timestamp = events_.back().timestamp;
  }
  if (sink_) sink_(event);
  events_.push_back(event);
  return event;
}

std::vector<AuthoringEvent> EventLog::snapshot() const {
  std::lock_guard lock(mutex_);
  return events_;
}

std::size_t EventLog::size() const {
  std::lock_guard lock(mutex_);
  return events_.size();
}

void verify_sequence(std::span<const AuthoringEvent> events) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto expected = static_cast<std::int64_t>(i) + 1;
    if (events[i].sequence != expected) {
      throw Error(ErrorKind::kIntegrity, "event log gap: expected sequence " +
                                             std::to_string(expected) + ", found " +
                                             std::to_string(events[i].sequence));
    }
  }
}

std::string to_ndjson_line(const AuthoringEvent& event) { return to_json(event).dump() + "\n"; }

NdjsonReadResult read_ndjson(std::istream& in, bool tolerate_torn_tail) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  NdjsonReadResult out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < data.size()) {
    ++line_no;
    std::size_t nl = data.find('\n', start);
    const bool terminated = nl != std::string::npos;
    std::string_view line(data.data() + start, (terminated ? nl : data.size()) - start);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      start = terminated ? nl + 1 : data.size();
      if (terminated) out.valid_bytes = start;
      continue;
    }
    auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded()) {
      if (tolerate_torn_tail && !terminated) {
        out.truncated_tail = true;
        break;
      }
      throw Error(ErrorKind::kIntegrity, "events line " + std::to_string(line_no) + ": invalid JSON");
    }
    if (!terminated) out.missing_final_newline = true;
    out.events.push_back(event_from_json(doc));
    start = terminated ? nl + 1 : data.size();
    out.valid_bytes = start;
  }
  return out;
}

}  // namespace coex::review
