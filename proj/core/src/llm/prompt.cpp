#include "coex/llm/prompt.hpp"

#include "coex/error.hpp"
#include "default_prompt_data.hpp"

namespace coex::llm {
namespace {

constexpr std::string_view kPlaceholders[] = {"{problem}", "{language}", "{code_numbered}"};

}  // namespace

PromptTemplate PromptTemplate::parse(std::string text) {
  for (auto placeholder : kPlaceholders) {
    if (text.find(placeholder) == std::string::npos) {
      throw_validation("prompt template is missing placeholder " + std::string(placeholder));
    }
  }
  return PromptTemplate(std::move(text));
}

const PromptTemplate& PromptTemplate::default_template() {
  static const PromptTemplate instance = parse(detail::kDefaultPromptText);
  return instance;
}

std::string number_code(const WorkedExample& example) {
  std::string out;
  for (const auto& line : example.lines()) {
    if (line.number > 1) out += '\n';
    out += std::to_string(line.number);
    out += ": ";
    out += line.text;
  }
  return out;
}

RenderedPrompt render_prompt(const PromptTemplate& prompt, const WorkedExample& example) {
  RenderedPrompt out;
  const std::string code = number_code(example);
  const std::string_view text = prompt.text();
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t open = text.find('{', i);
    if (open == std::string_view::npos) {
      out.text.append(text.substr(i));
      break;
    }
    out.text.append(text.substr(i, open - i));
    std::string_view rest = text.substr(open);
    if (rest.starts_with("{problem}")) {
      out.text += example.problem();
      i = open + 9;
    } else if (rest.starts_with("{language}")) {
      out.text += to_string(example.language());
      i = open + 10;
    } else if (rest.starts_with("{code_numbered}")) {
      out.text += code;
      i = open + 15;
    } else {
      out.text += '{';
      i = open + 1;
    }
  }
  if (example.problem().empty()) out.warnings.push_back("problem statement is empty");
  return out;
}

}  // namespace coex::llm
