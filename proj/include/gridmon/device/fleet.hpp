#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "gridmon/common/net.hpp"
#include "gridmon/device/scenario.hpp"
#include "gridmon/domain/types.hpp"
#include "gridmon/pq/event_detector.hpp"
#include "gridmon/wire/keyring.hpp"

namespace gridmon::device {

struct FleetOptions {
  net::Endpoint center{"127.0.0.1", 7450};
  std::filesystem::path journal_dir = "journal";
  bool durable_journal = true;
  const wire::Keyring* keys = nullptr;  // device id == point id
  wire::NonceLog* nonce_log = nullptr;
  pq::EventDetectorConfig detector;
  // Simulated seconds per wall second; 0 runs as fast as possible.
  double speed = 0.0;
  std::chrono::milliseconds drain_timeout{30000};
  bool keep_outputs = false;
  // Called by each device thread after stepping second t (tests use this
  // to pause or crash the center mid-run).
  std::function<void(std::uint32_t point_id, std::uint64_t t_s)> on_step;
};

struct DeviceReport {
  std::uint32_t point_id = 0;
  std::uint64_t data_frames = 0;
  std::uint64_t event_frames = 0;
  std::uint64_t frames_sent = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t connects = 0;
  std::uint64_t acked = 0;
  bool drained = false;
  std::vector<BaseRecord> records;
  std::vector<PQEvent> events;
};

struct FleetReport {
  std::vector<DeviceReport> devices;
  std::chrono::milliseconds wall{0};

  bool all_drained() const;
  std::uint64_t total_data_frames() const;
  std::uint64_t total_event_frames() const;
};

// Runs every device of the scenario on its own thread against the center,
// honouring link outages, and drains the journals at the end.
FleetReport run_fleet(const Scenario& scenario, const FleetOptions& options);

}  // namespace gridmon::device
