#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coex/llm/gateway.hpp"

namespace coex::service {

struct MockSettings {
  std::uint64_t seed = 42;
  int fragments_per_line = 2;
  std::optional<std::string> fixture_path;
};

struct ServiceConfig {
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "COEX_API_KEY";
  std::string api_key;  // resolved from api_key_env, never read from the file
  int request_timeout_s = 30;
  llm::RetryPolicy retry;
  int max_concurrent_generations = 4;

  std::vector<double> close_reopen_thresholds_s{5.0, 12.0};
  std::optional<std::string> stopwords_path;
  std::optional<std::string> prompt_path;

  /// Bearer token -> author id. Empty map: every request acts as
  /// `default_author`.
  std::map<std::string, std::string> tokens;
  std::string default_author = "local";

  MockSettings mock;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
EnvLookup process_env();

/// Unknown keys are rejected so typos do not silently fall back to defaults.
ServiceConfig config_from_json(const nlohmann::json& doc);
ServiceConfig load_config(const std::string& path);

/// COEX_BASE_URL overrides base_url; the key comes from `api_key_env`.
void apply_env(ServiceConfig& config, const EnvLookup& env);

nlohmann::json to_json(const ServiceConfig& config);  // without the key

}  // namespace coex::service
