#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "coex/example.hpp"

namespace coex::llm {

using CandidateMap = std::map<int, std::vector<std::string>>;

struct ParsedResponse {
  CandidateMap candidates;  // only explainable lines, explanations in order
  std::vector<std::string> warnings;
};

/// Parses a structured reply: a JSON array of {"line": int, "explanations":
/// [text, ...]} records, optionally wrapped in a ```json fence or in an object
/// under "lines". Records for unknown or non-explainable lines, malformed
/// records and blank explanations are dropped with a warning. Throws
/// Error(kValidation) when the payload itself cannot be parsed.
ParsedResponse parse_response(std::string_view raw, const WorkedExample& example);

}  // namespace coex::llm
