#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coex {

/// Failure categories shared by every module. The HTTP layer maps each kind
/// onto one status code (see docs/api.md).
enum class ErrorKind {
  kNotFound,     // unknown example, line, fragment, session
  kValidation,   // malformed input or violated precondition
  kConflict,     // stale version, terminal state
  kProvider,     // LLM provider failure after retries
  kIntegrity,    // corrupted log or store
  kIo,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void throw_not_found(const std::string& message);
[[noreturn]] void throw_validation(const std::string& message);
[[noreturn]] void throw_conflict(const std::string& message);

}  // namespace coex
