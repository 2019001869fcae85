#include "coex/service/config.hpp"

#include <cstdlib>
#include <fstream>

#include "coex/error.hpp"

namespace coex::service {
namespace {

using nlohmann::json;

template <class T>
void read(const json& obj, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw_validation(std::string("config: bad value for '") + key + "'");
  }
}

void read_optional(const json& obj, const char* key, std::optional<std::string>& out) {
  if (!obj.contains(key) || obj[key].is_null()) return;
  std::string v;
  read(obj, key, v);
  out = std::move(v);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (auto a : allowed) known = known || it.key() == a;
    if (!known) throw_validation("config: unknown key '" + where + it.key() + "'");
  }
}

}  // namespace

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

ServiceConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw_validation("config: expected a JSON object");
  check_keys(doc, "",
             {"model", "temperature", "base_url", "api_key_env", "request_timeout_s", "retry",
              "max_concurrent_generations", "close_reopen_thresholds_s", "stopwords_path",
              "prompt_path", "tokens", "default_author", "mock"});
  ServiceConfig c;
  read(doc, "model", c.model);
  read(doc, "temperature", c.temperature);
  read(doc, "base_url", c.base_url);
  read(doc, "api_key_env", c.api_key_env);
  read(doc, "request_timeout_s", c.request_timeout_s);
  read(doc, "max_concurrent_generations", c.max_concurrent_generations);
  read(doc, "close_reopen_thresholds_s", c.close_reopen_thresholds_s);
  read_optional(doc, "stopwords_path", c.stopwords_path);
  read_optional(doc, "prompt_path", c.prompt_path);
  read(doc, "tokens", c.tokens);
  read(doc, "default_author", c.default_author);

  if (auto it = doc.find("retry"); it != doc.end()) {
    check_keys(*it, "retry.", {"max_attempts", "initial_backoff_ms", "backoff_multiplier", "total_budget_ms"});
    read(*it, "max_attempts", c.retry.max_attempts);
    std::int64_t ms = c.retry.initial_backoff.count();
    read(*it, "initial_backoff_ms", ms);
    c.retry.initial_backoff = std::chrono::milliseconds(ms);
    read(*it, "backoff_multiplier", c.retry.backoff_multiplier);
    ms = c.retry.total_budget.count();
    read(*it, "total_budget_ms", ms);
    c.retry.total_budget = std::chrono::milliseconds(ms);
  }
  if (auto it = doc.find("mock"); it != doc.end()) {
    check_keys(*it, "mock.", {"seed", "fragments_per_line", "fixture_path"});
    read(*it, "seed", c.mock.seed);
    read(*it, "fragments_per_line", c.mock.fragments_per_line);
    read_optional(*it, "fixture_path", c.mock.fixture_path);
  }

  if (c.temperature < 0.0 || c.temperature > 2.0) throw_validation("config: temperature must be in [0, 2]");
  if (c.max_concurrent_generations < 1) throw_validation("config: max_concurrent_generations must be >= 1");
  if (c.retry.max_attempts < 1) throw_validation("config: retry.max_attempts must be >= 1");
  if (c.close_reopen_thresholds_s.empty()) throw_validation("config: close_reopen_thresholds_s is empty");
  for (double t : c.close_reopen_thresholds_s) {
    if (!(t > 0.0)) throw_validation("config: close-reopen thresholds must be positive");
  }
  return c;
}

ServiceConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw_validation("config '" + path + "': " + e.what());
  }
  return config_from_json(doc);
}

void apply_env(ServiceConfig& config, const EnvLookup& env) {
  if (auto v = env("COEX_BASE_URL"); v && !v->empty()) config.base_url = *v;
  if (auto v = env(config.api_key_env)) config.api_key = *v;
}

json to_json(const ServiceConfig& c) {
  json mock = {{"seed", c.mock.seed}, {"fragments_per_line", c.mock.fragments_per_line}};
  if (c.mock.fixture_path) mock["fixture_path"] = *c.mock.fixture_path;
  json j = {{"model", c.model},
            {"temperature", c.temperature},
            {"base_url", c.base_url},
            {"api_key_env", c.api_key_env},
            {"request_timeout_s", c.request_timeout_s},
            {"retry",
             {{"max_attempts", c.retry.max_attempts},
              {"initial_backoff_ms", c.retry.initial_backoff.count()},
              {"backoff_multiplier", c.retry.backoff_multiplier},
              {"total_budget_ms", c.retry.total_budget.count()}}},
            {"max_concurrent_generations", c.max_concurrent_generations},
            {"close_reopen_thresholds_s", c.close_reopen_thresholds_s},
            {"default_author", c.default_author},
            {"authors", c.tokens.size()},
            {"mock", mock}};
  if (c.stopwords_path) j["stopwords_path"] = *c.stopwords_path;
  if (c.prompt_path) j["prompt_path"] = *c.prompt_path;
  return j;
}

}  // namespace coex::service
