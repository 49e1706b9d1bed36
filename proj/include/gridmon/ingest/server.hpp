#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <list>
#include <map>
#include <mutex>
#include <thread>

#include "gridmon/common/net.hpp"
#include "gridmon/ingest/ingest_core.hpp"
#include "gridmon/wire/keyring.hpp"

namespace gridmon::ingest {

struct ServerOptions {
  net::Endpoint listen{"0.0.0.0", 7450};
  // Holds the persisted boot epoch that keeps server->device nonces fresh
  // across restarts.
  std::filesystem::path state_dir;
  wire::NonceLog* nonce_log = nullptr;
};

// Reads, increments and durably stores the boot epoch under `state_dir`.
std::uint32_t next_boot_epoch(const std::filesystem::path& state_dir);

/// TCP front end: one thread per device connection. Each read drains every
/// complete frame in the socket buffer, commits them as one group and
/// answers with a single cumulative ACK.
class IngestServer {
 public:
  IngestServer(IngestCore& core, const wire::Keyring& keys, ServerOptions options);
  ~IngestServer();

  IngestServer(const IngestServer&) = delete;
  IngestServer& operator=(const IngestServer&) = delete;

  void start();
  void stop();
  std::uint16_t port() const { return port_; }

 private:
  void accept_loop();
  void serve(UniqueFd fd);
  Bytes seal_reply(std::uint32_t device_id, wire::FrameType type, ByteView payload);

  IngestCore& core_;
  const wire::Keyring& keys_;
  ServerOptions options_;
  std::uint32_t boot_epoch_ = 0;
  UniqueFd listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;

  std::mutex mu_;
  std::list<std::thread> sessions_;
  std::map<std::uint32_t, std::uint32_t> reply_counters_;
};

}  // namespace gridmon::ingest
