#include "gridmon/service/config.hpp"

#include <set>

#include <json.hpp>

#include "gridmon/common/record_log.hpp"
#include "gridmon/domain/registry.hpp"

namespace gridmon::service {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "listen_ingest", "listen_http",      "data_dir",        "wal_dir",
    "points_file",   "keys_file",        "tokens_file",     "watch_dir",
    "hot_window_hours", "retention_days", "rollup_grace_s", "clock",
    "maintenance_interval_s", "demote_interval_s", "fsync"};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

double positive(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  double v = j.at(key).get<double>();
  if (!(v > 0)) throw ConfigError(std::string(key) + " must be positive");
  return v;
}

}  // namespace

ServeConfig ServeConfig::parse_json(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!kKnownKeys.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");

  ServeConfig c;
  try {
    if (j.contains("listen_ingest")) c.listen_ingest = net::parse_endpoint(j["listen_ingest"].get<std::string>());
    if (j.contains("listen_http")) c.listen_http = net::parse_endpoint(j["listen_http"].get<std::string>());
    c.data_dir = resolve(base_dir, j.value("data_dir", std::string("data")));
    c.wal_dir = j.contains("wal_dir") ? resolve(base_dir, j["wal_dir"].get<std::string>()) : c.data_dir / "wal";
    c.points_file = resolve(base_dir, j.value("points_file", std::string("points.csv")));
    c.keys_file = resolve(base_dir, j.value("keys_file", std::string("keys.tsv")));
    c.tokens_file = resolve(base_dir, j.value("tokens_file", std::string("tokens.tsv")));
    if (j.contains("watch_dir") && !j["watch_dir"].is_null())
      c.watch_dir = resolve(base_dir, j["watch_dir"].get<std::string>());
    c.hot_window_hours = positive(j, "hot_window_hours", c.hot_window_hours);
    c.retention_days = j.value("retention_days", 0);
    if (c.retention_days < 0) throw ConfigError("retention_days must be >= 0");
    c.rollup_grace_s = j.value("rollup_grace_s", c.rollup_grace_s);
    if (c.rollup_grace_s < 0) throw ConfigError("rollup_grace_s must be >= 0");
    auto clock = j.value("clock", std::string("wall"));
    if (clock == "wall") c.clock = ClockMode::kWall;
    else if (clock == "data") c.clock = ClockMode::kData;
    else throw ConfigError("clock must be \"wall\" or \"data\"");
    c.maintenance_interval_s = positive(j, "maintenance_interval_s", c.maintenance_interval_s);
    c.demote_interval_s = positive(j, "demote_interval_s", c.demote_interval_s);
    c.fsync = j.value("fsync", true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ServeConfig ServeConfig::load_json(const std::filesystem::path& path) {
  Bytes bytes;
  try {
    bytes = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  return parse_json(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                    path.parent_path());
}

}  // namespace gridmon::service
