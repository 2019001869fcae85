#include "coex/error.hpp"

namespace coex {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kConflict: return "conflict";
    case ErrorKind::kProvider: return "provider";
    case ErrorKind::kIntegrity: return "integrity";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

void throw_not_found(const std::string& message) { throw Error(ErrorKind::kNotFound, message); }
void throw_validation(const std::string& message) { throw Error(ErrorKind::kValidation, message); }
void throw_conflict(const std::string& message) { throw Error(ErrorKind::kConflict, message); }

}  // namespace coex
