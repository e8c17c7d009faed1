#include "qft/api/http.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace qft::api {

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req, bool allow_empty) {
  if (req.body.empty()) {
    if (allow_empty) return json(nullptr);
    throw ApiError(400, "request body is empty");
  }
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ApiError(400, std::string("malformed JSON: ") + e.what());
  }
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, 200, f(req));
    } catch (const ApiError& e) {
      send_json(res, e.status(), {{"error", e.what()}, {"status", e.status()}});
    } catch (const std::exception& e) {
      spdlog::error("{} {}: {}", req.method, req.path, e.what());
      send_json(res, 500, {{"error", e.what()}, {"status", 500}});
    }
  };
}

}  // namespace

HttpServer::HttpServer(Service& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.Post("/sessions", guarded([this](const httplib::Request& req) { return service_.create_session(parse_body(req, false)); }));
  s.Get(R"(/sessions/([^/]+)/templates)",
        guarded([this](const httplib::Request& req) { return service_.templates(req.matches[1].str()); }));
  s.Get(R"(/sessions/([^/]+)/bounds)",
        guarded([this](const httplib::Request& req) { return service_.bounds(req.matches[1].str()); }));
  s.Put(R"(/sessions/([^/]+)/controller)", guarded([this](const httplib::Request& req) {
          return service_.evaluate_controller(req.matches[1].str(), parse_body(req, false));
        }));
  s.Post(R"(/sessions/([^/]+)/simulate)", guarded([this](const httplib::Request& req) {
           return service_.simulate(req.matches[1].str(), parse_body(req, true));
         }));
  s.Get(R"(/sessions/([^/]+)/report)",
        guarded([this](const httplib::Request& req) { return service_.report(req.matches[1].str()); }));
  s.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

bool HttpServer::is_running() const { return server_->is_running(); }

}  // namespace qft::api
