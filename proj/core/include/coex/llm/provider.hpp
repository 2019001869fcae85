#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coex/error.hpp"

namespace coex::llm {

struct GenerationRequest {
  std::string example_id;
  std::string prompt;
  std::string model;
  double temperature = 0.0;  // [0, 2]

  /// Throws Error(kValidation) when temperature is out of range or the
  /// prompt is empty.
  void validate() const;
};

/// Failure talking to a chat-completion provider.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& message, bool retriable, int http_status = 0)
      : Error(ErrorKind::kProvider, message), retriable_(retriable), http_status_(http_status) {}

  bool retriable() const noexcept { return retriable_; }
  /// 0 when no HTTP response was received (timeout, connection refused).
  int http_status() const noexcept { return http_status_; }

 private:
  bool retriable_;
  int http_status_;
};

/// Turns a rendered prompt into the model's raw reply text.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string name() const = 0;
  virtual std::string complete(const GenerationRequest& request) = 0;
};

/// Offline provider. With a fixture it replies with exactly the fixture's
/// line -> explanations mapping; without one it synthesizes
/// `fragments_per_line` explanations for every non-blank numbered line found
/// in the prompt. Output is a pure function of (seed, request).
class MockProvider final : public ChatProvider {
 public:
  struct Options {
    std::uint64_t seed = 42;
    int fragments_per_line = 2;
    std::optional<std::map<int, std::vector<std::string>>> fixture;
    /// Returned verbatim instead of a generated payload (for parse-failure
    /// scenarios).
    std::optional<std::string> raw_reply;
  };

  MockProvider();
  explicit MockProvider(Options options);

  /// JSON object: {"seed": int?, "fragments_per_line": int?,
  ///               "lines": {"<n>": [text, ...]}?, "raw": text?}
  static std::unique_ptr<MockProvider> from_fixture_file(const std::string& path);

  std::string name() const override { return "mock"; }
  std::string complete(const GenerationRequest& request) override;

 private:
  Options options_;
};

/// OpenAI-style chat-completion client: POST {base_url}/chat/completions with
/// a bearer key; the reply text is choices[0].message.content.
class HttpChatProvider final : public ChatProvider {
 public:
  struct Options {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    std::chrono::seconds timeout{30};
    std::string system_message =
        "You explain program code line by line for novice programmers. Reply with JSON only.";
  };

  explicit HttpChatProvider(Options options);

  std::string name() const override { return "http"; }
  std::string complete(const GenerationRequest& request) override;

 private:
  Options options_;
};

}  // namespace coex::llm
