#pragma once

#include <map>
#include <memory>
#include <string>

#include "ltg/challenge.hpp"
#include "ltg/error.hpp"

namespace ltg::challenge {

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::string authorization;  // raw Authorization header
  std::string admin_token_header;  // raw X-Admin-Token header
};

struct ApiResponse {
  int status = 200;
  std::string body;
};

/// HTTP status used for a service error code.
int http_status(ErrorCode code) noexcept;

/// Transport-independent router for the challenge JSON API.
class Api {
 public:
  /// An empty admin token disables POST /api/phase.
  Api(ChallengeService& service, std::string admin_token);

  ApiResponse handle(const ApiRequest& request) const;

 private:
  ApiResponse route(const ApiRequest& request) const;
  bool authorized(const ApiRequest& request) const;

  ChallengeService& service_;
  std::string admin_token_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;  // optional judge UI bundle served at /
};

/// httplib front end for an Api.
class HttpServer {
 public:
  HttpServer(const Api& api, ServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket; port 0 picks a free port. Returns the bound port or -1.
  int bind();
  /// Serves until stop() is called. Requires a successful bind().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ServerOptions options_;
};

}  // namespace ltg::challenge
