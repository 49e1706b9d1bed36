#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "gridmon/domain/types.hpp"

namespace gridmon {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed set of measurement points known to a deployment. Loaded once at
/// startup; read-only afterwards.
class PointRegistry {
 public:
  PointRegistry() = default;
  explicit PointRegistry(std::vector<MeasurementPoint> points);

  // CSV with header `point_id,name,nominal_voltage_v,nominal_frequency_hz`.
  static PointRegistry parse_csv(std::string_view text);
  static PointRegistry load_csv(const std::filesystem::path& path);

  const MeasurementPoint* find(std::uint32_t point_id) const;
  bool contains(std::uint32_t point_id) const { return find(point_id) != nullptr; }
  std::size_t size() const { return points_.size(); }
  const std::map<std::uint32_t, MeasurementPoint>& points() const { return points_; }

 private:
  void add(MeasurementPoint p);

  std::map<std::uint32_t, MeasurementPoint> points_;
};

}  // namespace gridmon
