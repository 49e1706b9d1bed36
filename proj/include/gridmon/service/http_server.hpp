#pragma once

#include <memory>
#include <thread>

#include "gridmon/common/net.hpp"
#include "gridmon/service/api.hpp"

namespace httplib {
class Server;
}

namespace gridmon::service {

/// Binds an Api to HTTP/1.1.
class HttpServer {
 public:
  HttpServer(const Api& api, net::Endpoint listen);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and starts serving on a background thread. Throws
  // std::runtime_error if the address cannot be bound.
  void start();
  void stop();
  std::uint16_t port() const { return port_; }

 private:
  const Api& api_;
  net::Endpoint listen_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::uint16_t port_ = 0;
};

}  // namespace gridmon::service
