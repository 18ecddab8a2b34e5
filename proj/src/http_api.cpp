#include "ltg/http_api.hpp"

#include <httplib.h>

#include <regex>

#include "ltg/error.hpp"

namespace ltg::challenge {

namespace {

ApiResponse json_response(int status, const Json& body) { return {status, body.dump()}; }

ApiResponse error_response(ErrorCode code, const std::string& message) {
  return json_response(http_status(code),
                       Json{{"error", error_code_name(code)}, {"message", message}});
}

nlohmann::json parse_body(const std::string& body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::BadRequest, "request body must be a JSON object");
  }
  return j;
}

std::string string_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw Error(ErrorCode::BadRequest, std::string("field '") + key + "' must be a string");
  }
  return j[key].get<std::string>();
}

int score_field(const nlohmann::json& j, std::string_view key) {
  const std::string k(key);
  if (!j.contains(k) || !j[k].is_number()) {
    throw Error(ErrorCode::BadRequest, "field '" + k + "' must be a number");
  }
  if (!j[k].is_number_integer()) {
    throw Error(ErrorCode::ScoreOutOfRange, "field '" + k + "' must be an integer in 1..5");
  }
  const auto v = j[k].get<std::int64_t>();
  if (v < 1 || v > 5) {
    throw Error(ErrorCode::ScoreOutOfRange, k + " score " + std::to_string(v) + " is outside 1..5");
  }
  return static_cast<int>(v);
}

const std::regex kHumanPath(R"(^/api/submissions/([^/]+)/human$)");

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadRequest:
    case ErrorCode::InvalidArgument:
      return 400;
    case ErrorCode::Unauthorized:
      return 401;
    case ErrorCode::UnknownAssignment:
    case ErrorCode::UnknownSubmission:
    case ErrorCode::NoWorkAvailable:
    case ErrorCode::NoRatings:
      return 404;
    case ErrorCode::WrongPhase:
    case ErrorCode::DuplicateRating:
    case ErrorCode::InvalidPhaseTransition:
      return 409;
    case ErrorCode::TooLong:
      return 413;
    case ErrorCode::UnknownPrompt:
    case ErrorCode::PromptPrefixMismatch:
    case ErrorCode::TooShort:
    case ErrorCode::ScoreOutOfRange:
      return 422;
    default:
      return 500;
  }
}

Api::Api(ChallengeService& service, std::string admin_token)
    : service_(service), admin_token_(std::move(admin_token)) {}

bool Api::authorized(const ApiRequest& request) const {
  if (admin_token_.empty()) return false;
  return request.authorization == "Bearer " + admin_token_ ||
         request.admin_token_header == admin_token_;
}

ApiResponse Api::handle(const ApiRequest& request) const {
  try {
    return route(request);
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  } catch (const std::exception& e) {
    return json_response(500, Json{{"error", "Internal"}, {"message", e.what()}});
  }
}

ApiResponse Api::route(const ApiRequest& r) const {
  const bool get = r.method == "GET";
  const bool post = r.method == "POST";

  if (r.path == "/api/submissions" && post) {
    const auto body = parse_body(r.body);
    const auto record = service_.submit(string_field(body, "team"), string_field(body, "prompt_id"),
                                        string_field(body, "text"));
    return json_response(201, to_json(record, false));
  }
  if (r.path == "/api/leaderboard" && get) {
    return json_response(200, to_json(service_.leaderboard()));
  }
  if (r.path == "/api/assignments/next" && get) {
    auto it = r.query.find("judge");
    if (it == r.query.end() || it->second.empty()) {
      throw Error(ErrorCode::BadRequest, "query parameter 'judge' is required");
    }
    return json_response(200, to_json(service_.next_assignment(it->second)));
  }
  if (r.path == "/api/ratings" && post) {
    const auto body = parse_body(r.body);
    const auto assignment_id = string_field(body, "assignment_id");
    Scores scores{};
    for (std::size_t k = 0; k < kDimensions.size(); ++k) scores[k] = score_field(body, kDimensions[k]);
    return json_response(201, to_json(service_.record_rating(assignment_id, scores)));
  }
  if (r.path == "/api/phase" && get) {
    return json_response(200, Json{{"phase", to_string(service_.phase())}});
  }
  if (r.path == "/api/phase" && post) {
    if (!authorized(r)) throw Error(ErrorCode::Unauthorized, "admin token required");
    const auto body = parse_body(r.body);
    service_.set_phase(parse_phase(string_field(body, "phase")));
    return json_response(200, Json{{"phase", to_string(service_.phase())}});
  }
  std::smatch m;
  if (get && std::regex_match(r.path, m, kHumanPath)) {
    return json_response(200, to_json(service_.aggregate_human_scores(m[1].str())));
  }
  const bool known = r.path == "/api/submissions" || r.path == "/api/leaderboard" ||
                     r.path == "/api/assignments/next" || r.path == "/api/ratings" ||
                     r.path == "/api/phase" || std::regex_match(r.path, m, kHumanPath);
  if (known) {
    return json_response(405, Json{{"error", "MethodNotAllowed"},
                                   {"message", r.method + " is not supported on " + r.path}});
  }
  return json_response(404, Json{{"error", "NotFound"}, {"message", "no route for " + r.path}});
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const Api& api, ServerOptions options)
    : impl_(std::make_unique<Impl>()), options_(std::move(options)) {
  const auto forward = [&api](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request;
    request.method = req.method;
    request.path = req.path;
    for (const auto& [k, v] : req.params) request.query.emplace(k, v);
    request.body = req.body;
    request.authorization = req.get_header_value("Authorization");
    request.admin_token_header = req.get_header_value("X-Admin-Token");
    const auto response = api.handle(request);
    res.status = response.status;
    res.set_content(response.body, "application/json");
  };
  auto& server = impl_->server;
  server.Get(R"(/api/.*)", forward);
  server.Post(R"(/api/.*)", forward);
  server.Put(R"(/api/.*)", forward);
  server.Delete(R"(/api/.*)", forward);
  if (!options_.static_dir.empty()) server.set_mount_point("/", options_.static_dir);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind() {
  auto& server = impl_->server;
  if (options_.port == 0) return server.bind_to_any_port(options_.host);
  return server.bind_to_port(options_.host, options_.port) ? options_.port : -1;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace ltg::challenge
