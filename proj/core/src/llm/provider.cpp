#include "coex/llm/provider.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace coex::llm {
namespace {

constexpr const char* kTemplates[] = {
    "This line is part of the main logic that solves the problem.",
    "The value produced here is used by the lines that follow.",
    "Pay attention to the syntax used on this line.",
    "Without this step the program would not produce the expected result.",
    "This is a common pattern worth remembering.",
    "Notice how this line relies on what was set up earlier.",
};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string_view trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// "12: int x = 5;" -> (12, "int x = 5;")
std::optional<std::pair<int, std::string_view>> numbered_line(std::string_view line) {
  std::size_t i = 0;
  int n = 0;
  while (i < line.size() && i < 7 && line[i] >= '0' && line[i] <= '9') {
    n = n * 10 + (line[i] - '0');
    ++i;
  }
  if (i == 0) return std::nullopt;
  std::string_view rest = line.substr(i);
  if (rest.starts_with(": ")) return std::make_pair(n, rest.substr(2));
  if (rest == ":") return std::make_pair(n, std::string_view{});
  return std::nullopt;
}

bool looks_explainable(std::string_view code) {
  code = trim(code);
  if (code.empty()) return false;
  if (code.starts_with("//") || code.starts_with("/*") || code.starts_with("*") ||
      code.starts_with("#")) {
    return false;
  }
  return code.find_first_not_of("{}();,") != std::string_view::npos;
}

}  // namespace

void GenerationRequest::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw_validation("temperature must be within [0, 2]");
  }
  if (prompt.empty()) throw_validation("prompt must not be empty");
}

MockProvider::MockProvider() : MockProvider(Options{}) {}

MockProvider::MockProvider(Options options) : options_(std::move(options)) {
  if (options_.fragments_per_line < 1) throw_validation("fragments_per_line must be >= 1");
}

std::unique_ptr<MockProvider> MockProvider::from_fixture_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read mock fixture '" + path + "'");
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw_validation("mock fixture '" + path + "' must be a JSON object");
  }
  Options opts;
  if (doc.contains("seed")) opts.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("fragments_per_line")) {
    opts.fragments_per_line = doc["fragments_per_line"].get<int>();
  }
  if (doc.contains("lines")) {
    std::map<int, std::vector<std::string>> fixture;
    for (const auto& [key, value] : doc["lines"].items()) {
      fixture[std::stoi(key)] = value.get<std::vector<std::string>>();
    }
    opts.fixture = std::move(fixture);
  }
  if (doc.contains("raw")) opts.raw_reply = doc["raw"].get<std::string>();
  return std::make_unique<MockProvider>(std::move(opts));
}

std::string MockProvider::complete(const GenerationRequest& request) {
  if (options_.raw_reply) return *options_.raw_reply;

  nlohmann::json reply = nlohmann::json::array();
  if (options_.fixture) {
    for (const auto& [line, texts] : *options_.fixture) {
      reply.push_back({{"line", line}, {"explanations", texts}});
    }
    return reply.dump();
  }

  std::istringstream prompt(request.prompt);
  std::string raw_line;
  while (std::getline(prompt, raw_line)) {
    auto parsed = numbered_line(raw_line);
    if (!parsed || !looks_explainable(parsed->second)) continue;
    const auto [number, code] = *parsed;
    std::mt19937_64 rng(options_.seed ^ fnv1a(request.example_id) ^
                        (static_cast<std::uint64_t>(number) * 0x9e3779b97f4a7c15ULL) ^
                        static_cast<std::uint64_t>(std::llround(request.temperature * 1000)));
    std::vector<std::string> texts;
    texts.push_back("Line " + std::to_string(number) + " runs `" + std::string(trim(code)) + "`.");
    for (int k = 1; k < options_.fragments_per_line; ++k) {
      texts.emplace_back(kTemplates[rng() % std::size(kTemplates)]);
    }
    reply.push_back({{"line", number}, {"explanations", texts}});
  }
  return reply.dump();
}

}  // namespace coex::llm
