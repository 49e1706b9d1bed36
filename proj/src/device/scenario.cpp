#include "gridmon/device/scenario.hpp"

#include <json.hpp>
#include <set>
#include <string>

#include "gridmon/common/record_log.hpp"
#include "gridmon/domain/registry.hpp"

namespace gridmon::device {

using nlohmann::json;

std::string_view injection_kind_name(InjectionKind k) {
  switch (k) {
    case InjectionKind::kSag: return "SAG";
    case InjectionKind::kSwell: return "SWELL";
    case InjectionKind::kInterruption: return "INTERRUPTION";
    case InjectionKind::kLinkOutage: return "LINK_OUTAGE";
  }
  return "?";
}

namespace {

InjectionKind parse_kind(const std::string& s) {
  for (auto k : {InjectionKind::kSag, InjectionKind::kSwell, InjectionKind::kInterruption,
                 InjectionKind::kLinkOutage})
    if (injection_kind_name(k) == s) return k;
  throw ConfigError("scenario: unknown injection kind '" + s + "'");
}

}  // namespace

void Scenario::validate() const {
  if (duration_s == 0) throw ConfigError("scenario: duration_s must be > 0");
  if (start_ms % 3000 != 0) throw ConfigError("scenario: start_ms must be aligned to 3 s");
  std::set<std::uint32_t> ids;
  for (const auto& d : devices) {
    if (!ids.insert(d.point_id).second)
      throw ConfigError("scenario: duplicate device point_id " + std::to_string(d.point_id));
    if (!(d.noise_sigma_pu >= 0.0)) throw ConfigError("scenario: noise_sigma_pu must be >= 0");
    if (!(d.nominal_voltage_v > 0.0)) throw ConfigError("scenario: nominal_voltage_v must be > 0");
  }
  for (const auto& inj : injected) {
    const std::string what = "scenario: " + std::string(injection_kind_name(inj.kind)) +
                             " on point " + std::to_string(inj.point_id);
    if (inj.duration_s == 0) throw ConfigError(what + ": duration_s must be > 0");
    if (!ids.count(inj.point_id)) throw ConfigError(what + ": unknown device");
    const double d = inj.depth_pu;
    switch (inj.kind) {
      case InjectionKind::kSag:
        if (!(d >= 0.1 && d < 0.9)) throw ConfigError(what + ": SAG depth must be in [0.1, 0.9)");
        break;
      case InjectionKind::kSwell:
        if (!(d > 1.1)) throw ConfigError(what + ": SWELL depth must be > 1.1");
        break;
      case InjectionKind::kInterruption:
        if (!(d >= 0.0 && d < 0.1)) throw ConfigError(what + ": INTERRUPTION depth must be < 0.1");
        break;
      case InjectionKind::kLinkOutage:
        break;
    }
    if (inj.kind != InjectionKind::kLinkOutage && (inj.phase_mask == 0 || inj.phase_mask > 7))
      throw ConfigError(what + ": phase_mask must be a nonempty subset of 0b111");
  }
}

const DeviceSpec* Scenario::find_device(std::uint32_t point_id) const {
  for (const auto& d : devices)
    if (d.point_id == point_id) return &d;
  return nullptr;
}

bool Scenario::link_down(std::uint32_t point_id, std::uint64_t t_s) const {
  for (const auto& inj : injected)
    if (inj.kind == InjectionKind::kLinkOutage && inj.point_id == point_id && inj.active_at(t_s))
      return true;
  return false;
}

Scenario Scenario::parse_json(std::string_view text) {
  Scenario s;
  try {
    const json j = json::parse(text);
    s.seed = j.value("seed", s.seed);
    s.duration_s = j.at("duration_s").get<std::uint64_t>();
    s.start_ms = j.value("start_ms", s.start_ms);
    for (const auto& d : j.at("devices")) {
      DeviceSpec spec;
      spec.point_id = d.at("point_id").get<std::uint32_t>();
      spec.noise_sigma_pu = d.value("noise_sigma_pu", spec.noise_sigma_pu);
      spec.nominal_voltage_v = d.value("nominal_voltage_v", spec.nominal_voltage_v);
      s.devices.push_back(spec);
    }
    if (j.contains("injected")) {
      for (const auto& i : j.at("injected")) {
        Injection inj;
        inj.kind = parse_kind(i.at("kind").get<std::string>());
        inj.point_id = i.at("point_id").get<std::uint32_t>();
        inj.start_s = i.at("start_s").get<std::uint64_t>();
        inj.duration_s = i.at("duration_s").get<std::uint64_t>();
        inj.depth_pu = i.value("depth_pu", 0.0);
        inj.phase_mask = i.value("phase_mask", std::uint8_t{7});
        s.injected.push_back(inj);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario Scenario::load_json(const std::filesystem::path& path) {
  Bytes data = read_file(path);
  return parse_json(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

std::string Scenario::to_json() const {
  json j;
  j["seed"] = seed;
  j["duration_s"] = duration_s;
  j["start_ms"] = start_ms;
  j["devices"] = json::array();
  for (const auto& d : devices)
    j["devices"].push_back({{"point_id", d.point_id},
                            {"noise_sigma_pu", d.noise_sigma_pu},
                            {"nominal_voltage_v", d.nominal_voltage_v}});
  j["injected"] = json::array();
  for (const auto& i : injected)
    j["injected"].push_back({{"kind", injection_kind_name(i.kind)},
                             {"point_id", i.point_id},
                             {"start_s", i.start_s},
                             {"duration_s", i.duration_s},
                             {"depth_pu", i.depth_pu},
                             {"phase_mask", i.phase_mask}});
  return j.dump(2);
}

}  // namespace gridmon::device
