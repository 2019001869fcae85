#include "coex/llm/gateway.hpp"

#include <thread>

namespace coex::llm {

std::size_t GenerationBatch::candidate_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [line, texts] : candidates) n += texts.size();
  return n;
}

double GenerationBatch::mean_per_line() const noexcept {
  if (candidates.empty()) return 0.0;
  return static_cast<double>(candidate_count()) / static_cast<double>(candidates.size());
}

nlohmann::json to_json(const GenerationBatch& batch) {
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& [line, texts] : batch.candidates) {
    candidates.push_back({{"line", line}, {"explanations", texts}});
  }
  return {{"id", batch.id},
          {"request",
           {{"example_id", batch.request.example_id},
            {"prompt", batch.request.prompt},
            {"model", batch.request.model},
            {"temperature", batch.request.temperature}}},
          {"raw_response", batch.raw_response},
          {"candidates", candidates},
          {"warnings", batch.warnings},
          {"parse_failed", batch.parse_failed},
          {"parse_error", batch.parse_error},
          {"created_at", format_iso8601(batch.created_at)}};
}

GenerationBatch batch_from_json(const nlohmann::json& doc) {
  try {
    GenerationBatch batch;
    batch.id = doc.at("id").get<std::string>();
    const auto& req = doc.at("request");
    batch.request.example_id = req.at("example_id").get<std::string>();
    batch.request.prompt = req.at("prompt").get<std::string>();
    batch.request.model = req.at("model").get<std::string>();
    batch.request.temperature = req.at("temperature").get<double>();
    batch.raw_response = doc.at("raw_response").get<std::string>();
    for (const auto& rec : doc.at("candidates")) {
      batch.candidates[rec.at("line").get<int>()] =
          rec.at("explanations").get<std::vector<std::string>>();
    }
    batch.warnings = doc.value("warnings", std::vector<std::string>{});
    batch.parse_failed = doc.value("parse_failed", false);
    batch.parse_error = doc.value("parse_error", std::string{});
    batch.created_at = parse_iso8601(doc.at("created_at").get<std::string>());
    return batch;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kIntegrity, std::string("malformed batch document: ") + e.what());
  }
}

Gateway::Gateway(std::shared_ptr<ChatProvider> provider, RetryPolicy retry, Sleeper sleeper,
                 Clock clock, std::shared_ptr<IdGenerator> ids)
    : provider_(std::move(provider)),
      retry_(retry),
      sleeper_(sleeper ? std::move(sleeper)
                       : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })),
      clock_(std::move(clock)),
      ids_(std::move(ids)) {
  if (!provider_) throw_validation("gateway needs a provider");
  if (retry_.max_attempts < 1) throw_validation("retry policy needs at least one attempt");
}

std::string Gateway::call_with_retry(const GenerationRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  std::chrono::milliseconds slept{0};
  auto backoff = retry_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return provider_->complete(request);
    } catch (const ProviderError& e) {
      if (!e.retriable() || attempt >= retry_.max_attempts) {
        throw ProviderError(e.what() + std::string(" (after ") + std::to_string(attempt) +
                                (attempt == 1 ? " attempt)" : " attempts)"),
                            e.retriable(), e.http_status());
      }
      auto elapsed = std::max(std::chrono::duration_cast<std::chrono::milliseconds>(
                                  std::chrono::steady_clock::now() - start),
                              slept);
      if (elapsed + backoff > retry_.total_budget) {
        throw ProviderError(e.what() + std::string(" (retry budget exhausted)"), true,
                            e.http_status());
      }
      sleeper_(backoff);
      slept += backoff;
      backoff = std::chrono::milliseconds(
          static_cast<std::int64_t>(static_cast<double>(backoff.count()) * retry_.backoff_multiplier));
    }
  }
}

GenerationBatch Gateway::generate(const GenerationRequest& request, const WorkedExample& example) {
  request.validate();
  GenerationBatch batch;
  batch.request = request;
  batch.raw_response = call_with_retry(request);
  batch.id = ids_->next("bat");
  batch.created_at = clock_();
  try {
    ParsedResponse parsed = parse_response(batch.raw_response, example);
    batch.candidates = std::move(parsed.candidates);
    batch.warnings = std::move(parsed.warnings);
  } catch (const Error& e) {
    batch.parse_failed = true;
    batch.parse_error = e.what();
  }
  return batch;
}

}  // namespace coex::llm
