#include "coex/service/http_api.hpp"

#include <charconv>

#include <httplib.h>

#include "coex/error.hpp"
#include "coex/llm/provider.hpp"

namespace coex::service {
namespace {

using nlohmann::json;

struct HttpError : std::runtime_error {
  HttpError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status(status), code(std::move(code)) {}
  int status;
  std::string code;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code,
                const std::string& message, json extra = json::object()) {
  json err = {{"code", code}, {"message", message}};
  err.update(extra);
  send_json(res, status, {{"error", err}});
}

void set_etag(httplib::Response& res, std::int64_t version) {
  res.set_header("ETag", "\"" + std::to_string(version) + "\"");
}

json body_object(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json doc;
  try {
    doc = json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw HttpError(400, "bad_request", std::string("malformed JSON body: ") + e.what());
  }
  if (!doc.is_object()) throw HttpError(400, "bad_request", "request body must be a JSON object");
  return doc;
}

template <class T>
T get_field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end()) throw_validation(std::string(key) + ": required field missing");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw_validation(std::string(key) + ": wrong type");
  }
}

template <class T>
std::optional<T> opt_field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw_validation(std::string(key) + ": wrong type");
  }
}

std::int64_t if_match(const httplib::Request& req) {
  if (!req.has_header("If-Match")) {
    throw HttpError(428, "precondition_required", "If-Match header with the current version is required");
  }
  std::string v = req.get_header_value("If-Match");
  if (v.rfind("W/", 0) == 0) v = v.substr(2);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw HttpError(400, "bad_request", "If-Match must hold an integer version");
  }
  return out;
}

int to_int(const std::string& s) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw_not_found("bad number '" + s + "'");
  return out;
}

std::string describe_error_kind(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kConflict: return "conflict";
    case ErrorKind::kProvider: return "provider";
    case ErrorKind::kIntegrity: return "integrity";
    case ErrorKind::kIo: return "io";
  }
  return "internal";
}

}  // namespace

int http_status(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kValidation: return 422;
    case ErrorKind::kConflict: return 409;
    case ErrorKind::kProvider: return 502;
    case ErrorKind::kIntegrity:
    case ErrorKind::kIo: return 500;
  }
  return 500;
}

struct HttpServer::Impl {
  explicit Impl(AuthoringService& s) : service(s) {}

  AuthoringService& service;
  httplib::Server server;

  std::string author(const httplib::Request& req) const {
    const auto& tokens = service.config().tokens;
    if (tokens.empty()) return service.config().default_author;
    const std::string h = req.get_header_value("Authorization");
    const std::string prefix = "Bearer ";
    if (h.rfind(prefix, 0) == 0) {
      auto it = tokens.find(h.substr(prefix.size()));
      if (it != tokens.end()) return it->second;
    }
    throw HttpError(401, "unauthorized", "missing or unknown bearer token");
  }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  Handler wrap(Handler fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const HttpError& e) {
        send_error(res, e.status, e.code, e.what());
      } catch (const llm::ProviderError& e) {
        send_error(res, 502, "provider", e.what(),
                   {{"retriable", e.retriable()}, {"provider_status", e.http_status()}});
      } catch (const Error& e) {
        send_error(res, http_status(e.kind()), describe_error_kind(e.kind()), e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      }
    };
  }

  void reply_example(httplib::Response& res, const WorkedExample& ex, int status = 200) {
    set_etag(res, ex.version());
    send_json(res, status, example_json(ex));
  }

  void reply_session(httplib::Response& res, const review::ReviewSession& s, int status = 200) {
    set_etag(res, s.version());
    send_json(res, status, session_json(s));
  }

  void routes();
};

void HttpServer::Impl::routes() {
  auto& S = service;
  const std::string id = "([A-Za-z0-9_-]+)";
  const std::string num = "([0-9]+)";
  const std::string ex = "/api/examples/" + id;
  const std::string ses = "/api/sessions/" + id;

  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Expose-Headers", "ETag"}});
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, PATCH, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, If-Match, Authorization");
    res.status = 204;
  });

  server.Get("/api/health", wrap([](const auto&, auto& res) {
    send_json(res, 200, {{"status", "ok"}});
  }));

  server.Get("/api/prompt/default", wrap([&S](const auto&, auto& res) {
    send_json(res, 200, {{"text", S.default_prompt().text()}});
  }));

  server.Post("/api/examples", wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    json body = body_object(req);
    if (body.contains("portable")) {
      reply_example(res, S.import_example(who, body["portable"]), 201);
      return;
    }
    ExampleDraft d;
    d.title = get_field<std::string>(body, "title");
    d.problem = opt_field<std::string>(body, "problem").value_or("");
    const auto lang = get_field<std::string>(body, "language");
    auto parsed = parse_language(lang);
    if (!parsed) throw_validation("language: unsupported language '" + lang + "'");
    d.language = *parsed;
    d.source = get_field<std::string>(body, "source");
    reply_example(res, S.create_example(who, d), 201);
  }));

  server.Get("/api/examples", wrap([this, &S](const auto& req, auto& res) {
    author(req);
    json items = json::array();
    for (const auto& e : S.list_examples()) {
      items.push_back({{"id", e.id()},
                       {"title", e.title()},
                       {"language", to_string(e.language())},
                       {"version", e.version()},
                       {"lines", e.lines().size()},
                       {"fragments", e.fragment_count()},
                       {"updated_at", format_iso8601(e.data().updated_at)}});
    }
    send_json(res, 200, {{"examples", items}});
  }));

  server.Get(ex, wrap([this, &S](const auto& req, auto& res) {
    author(req);
    reply_example(res, S.get_example(req.matches[1]));
  }));

  server.Put(ex, wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    const auto version = if_match(req);
    json body = body_object(req);
    ExamplePatch p{opt_field<std::string>(body, "title"), opt_field<std::string>(body, "problem"),
                   opt_field<std::string>(body, "source")};
    reply_example(res, S.update_example(who, req.matches[1], version, p));
  }));

  server.Delete(ex, wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    S.delete_example(who, req.matches[1], if_match(req));
    res.status = 204;
  }));

  server.Patch(ex + "/lines/" + num, wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    const auto version = if_match(req);
    json body = body_object(req);
    reply_example(res, S.set_explainable(who, req.matches[1], version, to_int(req.matches[2]),
                                         get_field<bool>(body, "explainable")));
  }));

  server.Post(ex + "/lines/" + num + "/fragments", wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    const auto version = if_match(req);
    json body = body_object(req);
    reply_example(res,
                  S.add_fragment(who, req.matches[1], version, to_int(req.matches[2]),
                                 get_field<std::string>(body, "text")),
                  201);
  }));

  server.Patch(ex + "/fragments/" + id, wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    auto version = if_match(req);
    json body = body_object(req);
    auto text = opt_field<std::string>(body, "text");
    auto liked = opt_field<bool>(body, "liked");
    if (!text && !liked) throw_validation("give text and/or liked");
    std::optional<WorkedExample> out;
    if (text) {
      out = S.edit_fragment(who, req.matches[1], version, req.matches[2], *text);
      version = out->version();
    }
    if (liked) out = S.set_liked(who, req.matches[1], version, req.matches[2], *liked);
    reply_example(res, *out);
  }));

  server.Delete(ex + "/fragments/" + id, wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    reply_example(res, S.remove_fragment(who, req.matches[1], if_match(req), req.matches[2]));
  }));

  server.Put(ex + "/lines/" + num + "/order", wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    const auto version = if_match(req);
    json body = body_object(req);
    reply_example(res, S.reorder_fragments(who, req.matches[1], version, to_int(req.matches[2]),
                                           get_field<std::vector<std::string>>(body, "order")));
  }));

  server.Post(ex + "/lines/" + num + "/merge", wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    const auto version = if_match(req);
    json body = body_object(req);
    reply_example(res, S.merge_fragments(who, req.matches[1], version, to_int(req.matches[2]),
                                         get_field<std::string>(body, "first_id"),
                                         get_field<std::string>(body, "second_id"),
                                         opt_field<std::string>(body, "separator").value_or(" ")));
  }));

  server.Get(ex + "/provenance", wrap([this, &S](const auto& req, auto& res) {
    author(req);
    send_json(res, 200, provenance_json(S.provenance(req.matches[1])));
  }));

  server.Get(ex + "/export", wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    const std::string name = req.has_param("format") ? req.get_param_value("format") : "portable";
    auto format = parse_export_format(name);
    if (!format) throw_validation("format: expected portable or pcex");
    send_json(res, 200, S.export_example(who, req.matches[1], *format));
  }));

  server.Post(ex + "/sessions", wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    auto opened = S.open_dialog(who, req.matches[1]);
    set_etag(res, opened.session.version());
    json body = session_json(opened.session);
    body["resumed"] = opened.resumed;
    send_json(res, opened.resumed ? 200 : 201, body);
  }));

  server.Get(ses, wrap([this, &S](const auto& req, auto& res) {
    author(req);
    reply_session(res, S.session(req.matches[1]));
  }));

  server.Post(ses + "/close", wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    reply_session(res, S.close_dialog(who, req.matches[1], if_match(req)));
  }));

  server.Post(ses + "/generate", wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    const auto version = if_match(req);
    json body = body_object(req);
    GenerateParams p{opt_field<std::string>(body, "prompt"), opt_field<double>(body, "temperature"),
                     opt_field<std::string>(body, "model")};
    reply_session(res, S.generate(who, req.matches[1], version, p));
  }));

  server.Put(ses + "/lines/" + num + "/include", wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    const auto version = if_match(req);
    json body = body_object(req);
    reply_session(res, S.set_line_included(who, req.matches[1], version, to_int(req.matches[2]),
                                           get_field<bool>(body, "included")));
  }));

  server.Put(ses + "/lines/" + num + "/fragments/" + num + "/include",
             wrap([this, &S](const auto& req, auto& res) {
               const std::string who = author(req);
               const auto version = if_match(req);
               json body = body_object(req);
               reply_session(res, S.set_fragment_included(
                                      who, req.matches[1], version, to_int(req.matches[2]),
                                      to_int(req.matches[3]), get_field<bool>(body, "included")));
             }));

  server.Post(ses + "/lines/" + num + "/fragments/" + num + "/like",
              wrap([this, &S](const auto& req, auto& res) {
                const std::string who = author(req);
                reply_session(res, S.toggle_like(who, req.matches[1], if_match(req),
                                                 to_int(req.matches[2]), to_int(req.matches[3])));
              }));

  server.Post(ses + "/apply", wrap([this, &S](const auto& req, auto& res) {
    const std::string who = author(req);
    auto out = S.apply(who, req.matches[1], if_match(req));
    json per_line = json::object();
    for (const auto& [line, n] : out.result.applied_per_line) per_line[std::to_string(line)] = n;
    set_etag(res, out.session.version());
    send_json(res, 200,
              {{"session", session_json(out.session)},
               {"example", example_json(out.example)},
               {"result",
                {{"applied", out.result.fragments.size()},
                 {"applied_per_line", per_line},
                 {"candidates", out.result.candidates},
                 {"excluded", out.result.excluded},
                 {"liked", out.result.liked},
                 {"lines_fully_excluded", out.result.lines_fully_excluded}}}});
  }));

  server.Get("/api/reports/authoring", wrap([this, &S](const auto& req, auto& res) {
    author(req);
    auto report = S.authoring_report();
    if (req.has_param("format") && req.get_param_value("format") == "text") {
      res.set_content(review::to_text(report), "text/plain");
      return;
    }
    send_json(res, 200, review::to_json(report));
  }));

  server.Get("/api/reports/metrics", wrap([this, &S](const auto& req, auto& res) {
    author(req);
    auto report = S.metrics_report();
    if (req.has_param("format") && req.get_param_value("format") == "csv") {
      res.set_content(metrics::to_csv(report), "text/csv");
      return;
    }
    send_json(res, 200, metrics::to_json(report));
  }));

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      send_error(res, res.status, res.status == 404 ? "not_found" : "http_error",
                 res.status == 404 ? "no such route" : "request failed");
    }
  });
}

HttpServer::HttpServer(AuthoringService& service) : impl_(std::make_unique<Impl>(service)) {
  impl_->routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace coex::service
