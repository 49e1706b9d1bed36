#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>

#include "gridmon/domain/registry.hpp"
#include "gridmon/ingest/ingest_core.hpp"
#include "gridmon/ingest/server.hpp"
#include "gridmon/service/api.hpp"
#include "gridmon/service/config.hpp"
#include "gridmon/service/http_server.hpp"
#include "gridmon/service/tokens.hpp"
#include "gridmon/wire/keyring.hpp"

namespace gridmon::service {

struct MaintenanceReport {
  std::size_t rollups = 0;
  std::size_t segments_written = 0;
  std::size_t segments_purged = 0;
  std::size_t files_imported = 0;
};

/// The data center process: loads configuration, replays the WAL, then
/// serves device ingest and the HTTP API while a background thread runs
/// rollup, demotion, retention and the optional import directory.
class Center {
 public:
  explicit Center(ServeConfig config);
  ~Center();

  Center(const Center&) = delete;
  Center& operator=(const Center&) = delete;

  // Replays the WAL and starts listening. Throws on bind or replay errors.
  void start();
  void stop();

  // One maintenance pass at the given time. `demote` also runs demotion
  // and retention.
  MaintenanceReport maintain(EpochMs now, bool demote);
  EpochMs now() const;

  std::uint16_t ingest_port() const { return server_->port(); }
  std::uint16_t http_port() const { return http_->port(); }

  ingest::IngestCore& core() { return *core_; }
  const Api& api() const { return *api_; }
  const ServeConfig& config() const { return config_; }

 private:
  void maintenance_loop();
  std::size_t scan_watch_dir();

  ServeConfig config_;
  PointRegistry registry_;
  wire::Keyring keys_;
  TokenTable tokens_;
  std::unique_ptr<store::TieredStore> store_;
  std::unique_ptr<store::EventStore> events_;
  std::unique_ptr<ingest::Rollup> rollup_;
  std::unique_ptr<ingest::IngestCore> core_;
  std::unique_ptr<ingest::IngestServer> server_;
  std::unique_ptr<Api> api_;
  std::unique_ptr<HttpServer> http_;
  SystemClock wall_;

  std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::thread maintenance_;
};

}  // namespace gridmon::service
