#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace coex {

/// Milliseconds since the Unix epoch, UTC.
using TimestampMs = std::int64_t;

/// Injectable time source. Tests pass a manual clock so event logs are
/// reproducible.
using Clock = std::function<TimestampMs()>;

TimestampMs system_now_ms();
Clock system_clock();

/// "2024-03-18T14:05:09.123Z"
std::string format_iso8601(TimestampMs ms);

/// Accepts the format produced by format_iso8601 (fraction optional).
/// Throws Error(kValidation) on anything else.
TimestampMs parse_iso8601(std::string_view text);

/// Deterministic clock for tests and fixtures: starts at `start` and is moved
/// explicitly, optionally auto-advancing by `step` on every read.
class ManualClock {
 public:
  explicit ManualClock(TimestampMs start = 1'700'000'000'000, TimestampMs step = 0)
      : now_(start), step_(step) {}

  TimestampMs now() {
    TimestampMs t = now_;
    now_ += step_;
    return t;
  }
  void advance(TimestampMs ms) { now_ += ms; }
  void set(TimestampMs ms) { now_ = ms; }
  TimestampMs peek() const { return now_; }

  /// Adapter; the ManualClock must outlive the returned Clock.
  Clock as_clock() {
    return [this] { return now(); };
  }

 private:
  TimestampMs now_;
  TimestampMs step_;
};

}  // namespace coex
