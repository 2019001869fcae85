#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coex/example.hpp"
#include "coex/ids.hpp"
#include "coex/llm/provider.hpp"
#include "coex/llm/response.hpp"
#include "coex/time.hpp"

namespace coex::llm {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_multiplier = 2.0;
  std::chrono::milliseconds total_budget{60000};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// One provider call: the request, the raw reply exactly as received, and
/// the candidates parsed from it.
struct GenerationBatch {
  std::string id;
  GenerationRequest request;
  std::string raw_response;
  CandidateMap candidates;
  std::vector<std::string> warnings;
  bool parse_failed = false;
  std::string parse_error;
  TimestampMs created_at = 0;

  std::size_t candidate_count() const noexcept;
  /// Candidates per line that has any; 0 for an empty batch.
  double mean_per_line() const noexcept;
};

nlohmann::json to_json(const GenerationBatch& batch);
GenerationBatch batch_from_json(const nlohmann::json& doc);

class Gateway {
 public:
  Gateway(std::shared_ptr<ChatProvider> provider, RetryPolicy retry = {},
          Sleeper sleeper = nullptr, Clock clock = system_clock(),
          std::shared_ptr<IdGenerator> ids = std::make_shared<IdGenerator>());

  /// Calls the provider with bounded retries on retriable failures and parses
  /// the reply against `example`. A reply that cannot be parsed still yields
  /// a batch (parse_failed set, no candidates). Throws ProviderError once
  /// retries or the time budget are exhausted, or on a non-retriable error.
  GenerationBatch generate(const GenerationRequest& request, const WorkedExample& example);

  const ChatProvider& provider() const noexcept { return *provider_; }

 private:
  std::string call_with_retry(const GenerationRequest& request);

  std::shared_ptr<ChatProvider> provider_;
  RetryPolicy retry_;
  Sleeper sleeper_;
  Clock clock_;
  std::shared_ptr<IdGenerator> ids_;
};

}  // namespace coex::llm
