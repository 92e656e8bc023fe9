#include "qcsm/pool_server.hpp"

#include <httplib.h>

namespace qcsm {

PoolServer::PoolServer(const AgentManager& manager)
    : manager_(manager), server_(std::make_unique<httplib::Server>()) {
  server_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });
  server_->Get("/pool", [this](const httplib::Request& req, httplib::Response& res) {
    auto pool = manager_.snapshot();
    if (req.has_param("service")) {
      ServiceId id;
      try {
        id = parse_service(req.get_param_value("service"));
      } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(e.what(), "text/plain");
        return;
      }
      std::erase_if(pool, [id](const DataPoolRecord& r) { return r.service != id; });
    }
    res.set_content(pool_dump(pool), "application/x-ndjson");
  });
}

PoolServer::~PoolServer() { stop(); }

int PoolServer::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) return -1;
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void PoolServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void PoolServer::wait() {
  if (thread_.joinable()) thread_.join();
}

}  // namespace qcsm
