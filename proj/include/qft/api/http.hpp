#pragma once

#include <memory>
#include <string>

#include "qft/api/service.hpp"

namespace httplib {
class Server;
}

namespace qft::api {

/// HTTP front end for a Service.
///   POST /sessions
///   GET  /sessions/{id}/templates
///   GET  /sessions/{id}/bounds
///   PUT  /sessions/{id}/controller
///   POST /sessions/{id}/simulate
///   GET  /sessions/{id}/report
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Bind without serving; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();
  bool is_running() const;

 private:
  Service& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace qft::api
