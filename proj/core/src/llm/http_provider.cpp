#include <httplib.h>

#include <nlohmann/json.hpp>

#include "coex/llm/provider.hpp"

namespace coex::llm {
namespace {

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

ParsedUrl split_url(const std::string& url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw_validation("base URL needs a scheme: '" + url + "'");
  std::size_t path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = url;
  } else {
    out.scheme_host_port = url.substr(0, path_start);
    out.path_prefix = url.substr(path_start);
  }
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  return out;
}

}  // namespace

HttpChatProvider::HttpChatProvider(Options options) : options_(std::move(options)) {
  split_url(options_.base_url);
}

std::string HttpChatProvider::complete(const GenerationRequest& request) {
  const ParsedUrl url = split_url(options_.base_url);
  httplib::Client client(url.scheme_host_port);
  const auto secs = static_cast<time_t>(options_.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);

  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  nlohmann::json body = {
      {"model", request.model},
      {"temperature", request.temperature},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", options_.system_message}},
                              {{"role", "user"}, {"content", request.prompt}}})}};

  auto res = client.Post(url.path_prefix + "/chat/completions", headers, body.dump(),
                         "application/json");
  if (!res) {
    throw ProviderError("provider request failed: " + httplib::to_string(res.error()), true);
  }
  if (res->status == 429 || res->status >= 500) {
    throw ProviderError("provider returned HTTP " + std::to_string(res->status), true,
                        res->status);
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProviderError("provider returned HTTP " + std::to_string(res->status) + ": " +
                            res->body.substr(0, 200),
                        false, res->status);
  }
  nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ProviderError("provider reply has no choices[0].message.content", false, res->status);
  }
}

}  // namespace coex::llm
