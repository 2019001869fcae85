#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "coex/example.hpp"

namespace coex::llm {

/// Prompt text containing the {problem}, {language} and {code_numbered}
/// placeholders. Construction fails if any of them is missing.
class PromptTemplate {
 public:
  static PromptTemplate parse(std::string text);
  /// The template shipped in data/default_prompt.txt.
  static const PromptTemplate& default_template();

  const std::string& text() const noexcept { return text_; }

 private:
  explicit PromptTemplate(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

struct RenderedPrompt {
  std::string text;
  std::vector<std::string> warnings;
};

/// Source lines prefixed with "N: ", joined by '\n'.
std::string number_code(const WorkedExample& example);

/// Substitutes placeholders in a single pass (substituted values are not
/// re-scanned). An empty problem statement renders as an empty segment and
/// adds a warning.
RenderedPrompt render_prompt(const PromptTemplate& prompt, const WorkedExample& example);

}  // namespace coex::llm
