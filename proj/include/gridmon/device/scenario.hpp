#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "gridmon/common/clock.hpp"

namespace gridmon::device {

enum class InjectionKind { kSag, kSwell, kInterruption, kLinkOutage };

struct DeviceSpec {
  std::uint32_t point_id = 0;
  double noise_sigma_pu = 0.005;
  double nominal_voltage_v = 230.0;
};

struct Injection {
  InjectionKind kind = InjectionKind::kSag;
  std::uint32_t point_id = 0;
  std::uint64_t start_s = 0;
  std::uint64_t duration_s = 0;
  double depth_pu = 0.0;  // ignored for link outages
  std::uint8_t phase_mask = 0x7;

  bool active_at(std::uint64_t t_s) const { return t_s >= start_s && t_s < start_s + duration_s; }
};

/// Simulator script: a fleet of devices, injected electrical events and
/// link outages over `duration_s` simulated seconds starting at `start_ms`.
struct Scenario {
  std::uint64_t seed = 1;
  std::uint64_t duration_s = 600;
  EpochMs start_ms = 1'700'000'400'000;  // a 10-minute boundary
  std::vector<DeviceSpec> devices;
  std::vector<Injection> injected;

  // Throws ConfigError on violated invariants.
  void validate() const;

  const DeviceSpec* find_device(std::uint32_t point_id) const;
  bool link_down(std::uint32_t point_id, std::uint64_t t_s) const;

  static Scenario parse_json(std::string_view text);
  static Scenario load_json(const std::filesystem::path& path);
  std::string to_json() const;
};

std::string_view injection_kind_name(InjectionKind k);

}  // namespace gridmon::device
