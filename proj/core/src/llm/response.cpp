#include "coex/llm/response.hpp"

#include <nlohmann/json.hpp>

#include "coex/error.hpp"

namespace coex::llm {
namespace {

std::string_view trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// ```json\n...\n``` -> inner text
std::string_view strip_fence(std::string_view s) {
  s = trim(s);
  if (!s.starts_with("```")) return s;
  std::size_t nl = s.find('\n');
  if (nl == std::string_view::npos) return s;
  std::string_view body = s.substr(nl + 1);
  std::size_t close = body.rfind("```");
  if (close != std::string_view::npos) body = body.substr(0, close);
  return trim(body);
}

}  // namespace

ParsedResponse parse_response(std::string_view raw, const WorkedExample& example) {
  nlohmann::json doc = nlohmann::json::parse(strip_fence(raw), nullptr, false);
  if (doc.is_discarded()) throw_validation("unparseable response: not valid JSON");
  if (doc.is_object() && doc.contains("lines")) doc = doc["lines"];
  if (!doc.is_array()) {
    throw_validation("unparseable response: expected an array of line records");
  }

  ParsedResponse out;
  const int line_count = static_cast<int>(example.lines().size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    const std::string where = "record " + std::to_string(i);
    if (!rec.is_object() || !rec.contains("line") || !rec["line"].is_number_integer() ||
        !rec.contains("explanations") || !rec["explanations"].is_array()) {
      out.warnings.push_back(where + ": malformed record dropped");
      continue;
    }
    const int line = rec["line"].get<int>();
    if (line < 1 || line > line_count) {
      out.warnings.push_back(where + ": unknown line " + std::to_string(line) + " dropped");
      continue;
    }
    if (!example.line(line).explainable) {
      out.warnings.push_back(where + ": line " + std::to_string(line) +
                             " is not explainable, dropped");
      continue;
    }
    std::vector<std::string> kept;
    for (const auto& e : rec["explanations"]) {
      if (!e.is_string()) {
        out.warnings.push_back(where + ": non-text explanation dropped");
        continue;
      }
      std::string_view text = trim(e.get_ref<const std::string&>());
      if (text.empty()) {
        out.warnings.push_back(where + ": empty explanation dropped");
        continue;
      }
      kept.emplace_back(text);
    }
    if (kept.empty()) continue;
    auto& slot = out.candidates[line];
    slot.insert(slot.end(), kept.begin(), kept.end());
  }
  return out;
}

}  // namespace coex::llm
