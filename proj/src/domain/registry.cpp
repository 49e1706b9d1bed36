#include "gridmon/domain/registry.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "gridmon/common/record_log.hpp"

namespace gridmon {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, int line) {
  std::string tmp(s);
  char* end = nullptr;
  double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size() || !std::isfinite(v))
    throw ConfigError("points.csv line " + std::to_string(line) + ": bad number '" + tmp + "'");
  return v;
}

}  // namespace

PointRegistry::PointRegistry(std::vector<MeasurementPoint> points) {
  for (auto& p : points) add(std::move(p));
}

void PointRegistry::add(MeasurementPoint p) {
  if (!(p.nominal_voltage_v > 0) || !(p.nominal_frequency_hz > 0))
    throw ConfigError("point " + std::to_string(p.point_id) + ": nominal values must be > 0");
  auto id = p.point_id;
  if (!points_.emplace(id, std::move(p)).second)
    throw ConfigError("duplicate point_id " + std::to_string(id));
}

PointRegistry PointRegistry::parse_csv(std::string_view text) {
  PointRegistry reg;
  int line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (!header_seen) {
      if (cols.size() != 4 || trim(cols[0]) != "point_id" || trim(cols[1]) != "name" ||
          trim(cols[2]) != "nominal_voltage_v" || trim(cols[3]) != "nominal_frequency_hz")
        throw ConfigError("points.csv: bad header");
      header_seen = true;
      continue;
    }
    if (cols.size() != 4)
      throw ConfigError("points.csv line " + std::to_string(line_no) + ": expected 4 columns");
    MeasurementPoint p;
    auto id_text = trim(cols[0]);
    auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), p.point_id);
    if (ec != std::errc{} || ptr != id_text.data() + id_text.size())
      throw ConfigError("points.csv line " + std::to_string(line_no) + ": bad point_id");
    p.name = std::string(trim(cols[1]));
    p.nominal_voltage_v = parse_double(trim(cols[2]), line_no);
    auto freq = trim(cols[3]);
    p.nominal_frequency_hz = freq.empty() ? 50.0 : parse_double(freq, line_no);
    reg.add(std::move(p));
  }
  if (!header_seen) throw ConfigError("points.csv: missing header");
  return reg;
}

PointRegistry PointRegistry::load_csv(const std::filesystem::path& path) {
  Bytes data = read_file(path);
  return parse_csv(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

const MeasurementPoint* PointRegistry::find(std::uint32_t point_id) const {
  auto it = points_.find(point_id);
  return it == points_.end() ? nullptr : &it->second;
}

}  // namespace gridmon
