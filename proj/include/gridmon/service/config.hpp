#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "gridmon/common/net.hpp"

namespace gridmon::service {

enum class ClockMode { kWall, kData };

/// Settings for `gridmon serve`, read from a JSON file. Relative paths are
/// resolved against the directory holding the config file.
struct ServeConfig {
  net::Endpoint listen_ingest{"0.0.0.0", 7450};
  net::Endpoint listen_http{"127.0.0.1", 8080};
  std::filesystem::path data_dir = "data";
  std::filesystem::path wal_dir;  // default <data_dir>/wal
  std::filesystem::path points_file = "points.csv";
  std::filesystem::path keys_file = "keys.tsv";
  std::filesystem::path tokens_file = "tokens.tsv";
  std::optional<std::filesystem::path> watch_dir;
  double hot_window_hours = 48.0;
  int retention_days = 0;  // 0 keeps segments forever
  double rollup_grace_s = 30.0;
  ClockMode clock = ClockMode::kWall;
  double maintenance_interval_s = 1.0;
  double demote_interval_s = 60.0;
  bool fsync = true;

  static ServeConfig parse_json(std::string_view text, const std::filesystem::path& base_dir = {});
  static ServeConfig load_json(const std::filesystem::path& path);
};

}  // namespace gridmon::service
