#pragma once

#include <memory>
#include <string>
#include <thread>

#include "qcsm/gateway.hpp"

namespace httplib {
class Server;
}

namespace qcsm {

/// Read-only HTTP view of an agent manager's data pool, for inspection.
///   GET /pool                 whole pool dump (NDJSON)
///   GET /pool?service=<id>    records of one service
///   GET /health               "ok"
class PoolServer {
 public:
  explicit PoolServer(const AgentManager& manager);
  ~PoolServer();
  PoolServer(const PoolServer&) = delete;
  PoolServer& operator=(const PoolServer&) = delete;

  /// Binds to host:port (port 0 picks a free one) and serves on a background
  /// thread. Returns the bound port, or -1 on failure.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  /// Blocks until stop() is called from elsewhere.
  void wait();

 private:
  const AgentManager& manager_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace qcsm
