#include "gridmon/service/http_server.hpp"

#include <httplib.h>

namespace gridmon::service {

HttpServer::HttpServer(const Api& api, net::Endpoint listen)
    : api_(api), listen_(std::move(listen)), server_(std::make_unique<httplib::Server>()) {
  auto handler = [this](const httplib::Request& hreq, httplib::Response& hres) {
    ApiRequest req;
    req.method = hreq.method;
    req.path = hreq.path;
    for (const auto& [k, v] : hreq.params) req.query[k] = v;
    req.authorization = hreq.get_header_value("Authorization");
    req.body = hreq.body;
    auto res = api_.handle(req);
    hres.status = res.status;
    hres.set_content(res.body, res.content_type);
  };
  server_->Get(R"(/.*)", handler);
  server_->Post(R"(/.*)", handler);
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::start() {
  int port = listen_.port == 0 ? server_->bind_to_any_port(listen_.host)
                               : (server_->bind_to_port(listen_.host, listen_.port) ? listen_.port : -1);
  if (port <= 0)
    throw std::runtime_error("cannot bind HTTP listener " + listen_.host + ":" + std::to_string(listen_.port));
  port_ = static_cast<std::uint16_t>(port);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpServer::stop() {
  if (!thread_.joinable()) return;
  server_->stop();
  thread_.join();
}

}  // namespace gridmon::service
