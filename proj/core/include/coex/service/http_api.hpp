#pragma once

#include <memory>
#include <string>

#include "coex/service/authoring_service.hpp"

namespace coex::service {

/// REST/JSON front end for AuthoringService. Routes and status codes are
/// listed in docs/api.md.
class HttpServer {
 public:
  explicit HttpServer(AuthoringService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();
  void wait_until_ready() const;
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP status for an error kind.
int http_status(ErrorKind kind) noexcept;

}  // namespace coex::service
