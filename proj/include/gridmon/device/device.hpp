#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "gridmon/common/net.hpp"
#include "gridmon/device/journal.hpp"
#include "gridmon/device/scenario.hpp"
#include "gridmon/pq/event_detector.hpp"
#include "gridmon/wire/frame.hpp"

namespace gridmon::device {

struct DeviceConfig {
  std::uint32_t device_id = 0;
  std::uint32_t point_id = 0;
  wire::Key key{};
  std::filesystem::path journal_dir = "journal";
  bool durable_journal = true;
  wire::NonceLog* nonce_log = nullptr;
  pq::EventDetectorConfig detector;
  // Keep copies of every emitted R3S record and event (test oracles).
  bool keep_outputs = false;
};

struct OutboundFrame {
  std::uint64_t seq = 0;
  wire::FrameType type = wire::FrameType::kData;
};

/// One simulated measurement device: synthesizes a 1 s record per step,
/// runs event detection on it and emits a 3 s aggregate (DATA frame) every
/// third second, followed by an EVENT frame when events closed since the
/// previous emission. Every frame is journaled before it counts as sent.
class Device {
 public:
  Device(const Scenario& scenario, DeviceConfig config);

  // Call once per simulated second, in order, starting at 0.
  std::vector<OutboundFrame> step(std::uint64_t t_s);

  Journal& journal() { return journal_; }
  const DeviceConfig& config() const { return config_; }

  // Seal a HELLO announcing the last journaled seq.
  Bytes make_hello();

  const std::vector<BaseRecord>& emitted_records() const { return emitted_records_; }
  const std::vector<PQEvent>& emitted_events() const { return emitted_events_; }
  std::uint64_t data_frames() const { return data_frames_; }
  std::uint64_t event_frames() const { return event_frames_; }

 private:
  std::uint64_t emit(wire::FrameType type, const Bytes& payload);

  const Scenario& scenario_;
  DeviceConfig config_;
  pq::EventDetectorState detector_;
  std::vector<BaseRecord> window_;
  std::vector<PQEvent> closed_;
  Journal journal_;
  std::vector<BaseRecord> emitted_records_;
  std::vector<PQEvent> emitted_events_;
  std::uint64_t data_frames_ = 0;
  std::uint64_t event_frames_ = 0;
};

struct LinkStats {
  std::uint64_t frames_sent = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t connects = 0;
  std::uint64_t acks = 0;
};

/// Store-and-forward transport for one device over a single TCP
/// connection: HELLO on connect, resend everything past the center's
/// cumulative ack, trim the journal as acks arrive.
class DeviceLink {
 public:
  DeviceLink(Device& device, net::Endpoint endpoint,
             std::chrono::milliseconds io_timeout = std::chrono::milliseconds(5000));

  bool connected() const { return fd_.valid(); }
  // Connects and resumes; false if the center is unreachable or refuses.
  bool connect();
  void disconnect();

  // Sends journaled frames not yet sent on this connection and consumes
  // acks already available. Disconnects on transport failure.
  void pump();

  // Pumps (reconnecting if needed) until every journaled frame is
  // acknowledged or the deadline passes.
  bool drain(std::chrono::milliseconds timeout);

  std::uint64_t acked() const { return acked_; }
  const LinkStats& stats() const { return stats_; }

 private:
  // Reads available frames; returns false on a broken connection.
  bool read_acks(std::chrono::milliseconds wait);

  Device& device_;
  net::Endpoint endpoint_;
  std::chrono::milliseconds io_timeout_;
  UniqueFd fd_;
  wire::FrameAssembler inbound_;
  std::uint64_t sent_through_ = 0;
  std::uint64_t acked_ = 0;
  std::uint64_t highest_ever_sent_ = 0;
  LinkStats stats_;
};

}  // namespace gridmon::device
