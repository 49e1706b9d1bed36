#include "gridmon/service/api.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gridmon/common/time_format.hpp"
#include "gridmon/domain/validate.hpp"
#include "gridmon/store/errors.hpp"

namespace gridmon::service {

using nlohmann::json;

namespace {

ApiResponse error(int status, std::string_view message) {
  return {status, "application/json", json{{"error", message}}.dump()};
}

// Distinguishes "absent" (nullopt) from "present but invalid" (throws).
struct BadRequest {
  std::string message;
};

const std::string* param(const ApiRequest& req, const std::string& name) {
  auto it = req.query.find(name);
  return it == req.query.end() ? nullptr : &it->second;
}

std::uint32_t point_param(const ApiRequest& req) {
  const auto* p = param(req, "point");
  if (!p) throw BadRequest{"missing point"};
  std::uint32_t id = 0;
  auto [ptr, ec] = std::from_chars(p->data(), p->data() + p->size(), id);
  if (ec != std::errc{} || ptr != p->data() + p->size() || p->empty()) throw BadRequest{"bad point"};
  return id;
}

EpochMs time_param(const ApiRequest& req, const std::string& name, std::optional<EpochMs> fallback) {
  const auto* p = param(req, name);
  if (!p) {
    if (fallback) return *fallback;
    throw BadRequest{"missing " + name};
  }
  auto ts = parse_timestamp(*p);
  if (!ts) throw BadRequest{"bad " + name};
  return *ts;
}

Resolution res_param(const ApiRequest& req, std::optional<Resolution> fallback) {
  const auto* p = param(req, "res");
  if (!p) {
    if (fallback) return *fallback;
    throw BadRequest{"missing res"};
  }
  auto r = parse_resolution(*p);
  if (!r) throw BadRequest{"bad res"};
  return *r;
}

json event_json(const PQEvent& e) {
  return json{{"point_id", e.point_id},   {"type", event_type_name(e.type)},
              {"phase_mask", e.phase_mask}, {"start_ms", e.start_ms},
              {"end_ms", e.end_ms},       {"extreme_pu", e.extreme_pu}};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Api::Api(ingest::IngestCore& core, const TokenTable& tokens) : core_(core), tokens_(tokens) {}

ApiResponse Api::handle(const ApiRequest& req) const {
  std::string_view token;
  constexpr std::string_view kBearer = "Bearer ";
  if (req.authorization.starts_with(kBearer)) {
    token = std::string_view(req.authorization).substr(kBearer.size());
  } else if (auto it = req.query.find("token"); it != req.query.end()) {
    token = it->second;
  }
  const ApiToken* tok = token.empty() ? nullptr : tokens_.find(token);

  struct Route {
    std::string_view method, path;
  };
  static constexpr Route kRoutes[] = {{"GET", "/api/v1/series"}, {"GET", "/api/v1/events"},
                                      {"GET", "/api/v1/points"}, {"GET", "/api/v1/status"},
                                      {"GET", "/api/v1/export"}, {"POST", "/api/v1/import/bulk"}};
  bool known_path = false;
  bool matched = false;
  for (const auto& r : kRoutes) {
    if (r.path != req.path) continue;
    known_path = true;
    matched = matched || r.method == req.method;
  }
  if (!known_path) return error(404, "no such endpoint");
  if (!matched) return error(405, "method not allowed");
  if (!tok) return error(401, "missing or unknown token");

  try {
    if (req.path == "/api/v1/series") return series(req, *tok);
    if (req.path == "/api/v1/events") return events(req, *tok);
    if (req.path == "/api/v1/points") return points(*tok);
    if (req.path == "/api/v1/status") return status();
    if (req.path == "/api/v1/export") return export_csv(req, *tok);
    return import_bulk(req, *tok);
  } catch (const BadRequest& e) {
    return error(400, e.message);
  } catch (const store::StoreError& e) {
    if (e.code() == store::StoreErrc::kUnknownPoint) return error(404, "unknown point");
    return error(500, e.what());
  }
}

// Checks shared by point-scoped reads: 400 before 403 before 404, so that a
// token never learns whether a point it cannot access exists.
static std::optional<ApiResponse> authorize(const ApiToken& tok, Scope scope, std::uint32_t point,
                                            const PointRegistry& reg) {
  if (!tok.has(scope)) return error(403, "token lacks scope");
  if (!tok.allows(point)) return error(403, "point not authorized");
  if (!reg.contains(point)) return error(404, "unknown point");
  return std::nullopt;
}

ApiResponse Api::series(const ApiRequest& req, const ApiToken& tok) const {
  const auto point = point_param(req);
  const auto* pname = param(req, "param");
  if (!pname) throw BadRequest{"missing param"};
  auto par = parse_parameter(*pname);
  if (!par) throw BadRequest{"unknown param"};
  const auto res = res_param(req, std::nullopt);
  const auto from = time_param(req, "from", std::nullopt);
  const auto to = time_param(req, "to", std::nullopt);
  if (from > to) throw BadRequest{"from after to"};
  if (auto denied = authorize(tok, kRead, point, core_.registry())) return *denied;

  json values = json::array();
  for (const auto& r : core_.store().query_range(point, res, from, to))
    values.push_back(json::array({r.ts_ms, parameter_value(r, *par), r.flags}));
  json body{{"point_id", point}, {"param", parameter_name(*par)}, {"resolution", resolution_name(res)},
            {"from", from},      {"to", to},                       {"values", std::move(values)}};
  return {200, "application/json", body.dump()};
}

ApiResponse Api::events(const ApiRequest& req, const ApiToken& tok) const {
  const auto point = point_param(req);
  const auto from = time_param(req, "from", EpochMs{0});
  const auto to = time_param(req, "to", std::numeric_limits<EpochMs>::max());
  std::optional<EventType> type;
  if (const auto* t = param(req, "type")) {
    type = parse_event_type(*t);
    if (!type) throw BadRequest{"bad type"};
  }
  if (from > to) throw BadRequest{"from after to"};
  if (auto denied = authorize(tok, kRead, point, core_.registry())) return *denied;

  json out = json::array();
  for (const auto& e : core_.events().query(point, from, to, type)) out.push_back(event_json(e));
  return {200, "application/json", out.dump()};
}

ApiResponse Api::points(const ApiToken& tok) const {
  json out = json::array();
  for (const auto& [id, p] : core_.registry().points()) {
    if (!tok.allows(id)) continue;
    out.push_back(json{{"point_id", id},
                       {"name", p.name},
                       {"nominal_voltage_v", p.nominal_voltage_v},
                       {"nominal_frequency_hz", p.nominal_frequency_hz}});
  }
  return {200, "application/json", out.dump()};
}

ApiResponse Api::status() const {
  const auto& c = core_.counters();
  json body{{"frames", c.frames.load()},
            {"duplicates", c.duplicates.load()},
            {"invalid_records", c.invalid_records.load()},
            {"records", c.records.load()},
            {"events", c.events.load()},
            {"decode_failures", c.decode_failures.load()},
            {"auth_failures", c.auth_failures.load()},
            {"sessions", c.sessions.load()},
            {"imported_records", c.imported_records.load()},
            {"hot_records", core_.store().hot_record_count()},
            {"segments", core_.store().segment_count()},
            {"stored_events", core_.events().size()},
            {"pending_rollups", core_.rollup().pending_windows()}};
  return {200, "application/json", body.dump()};
}

ApiResponse Api::export_csv(const ApiRequest& req, const ApiToken& tok) const {
  const auto point = point_param(req);
  const auto res = res_param(req, Resolution::R3S);
  const auto from = time_param(req, "from", std::nullopt);
  const auto to = time_param(req, "to", std::nullopt);
  if (from > to) throw BadRequest{"from after to"};
  if (auto denied = authorize(tok, kExport, point, core_.registry())) return *denied;

  std::string out = "ts_ms";
  for (std::size_t i = 0; i < kParameterCount; ++i)
    out += "," + std::string(parameter_name(static_cast<Parameter>(i)));
  out += ",flags\n";
  for (const auto& r : core_.store().query_range(point, res, from, to)) {
    out += std::to_string(r.ts_ms);
    for (std::size_t i = 0; i < kParameterCount; ++i)
      out += "," + format_double(parameter_value(r, static_cast<Parameter>(i)));
    out += "," + std::to_string(r.flags) + "\n";
  }
  return {200, "text/csv", std::move(out)};
}

ApiResponse Api::import_bulk(const ApiRequest& req, const ApiToken& tok) const {
  if (!tok.has(kImport)) return error(403, "token lacks scope");
  const auto res = res_param(req, Resolution::R3S);
  ImportReport rep;
  try {
    rep = import_csv(req.body, res, &tok);
  } catch (const std::invalid_argument& e) {
    return error(400, e.what());
  }
  json rejected = json::array();
  for (const auto& r : rep.rejected) rejected.push_back(json{{"line", r.line}, {"reason", r.reason}});
  json body{{"accepted", rep.accepted}, {"rejected", std::move(rejected)}, {"records", rep.records}};
  return {200, "application/json", body.dump()};
}

ImportReport Api::import_csv(std::string_view csv, Resolution res, const ApiToken* token) const {
  auto lines = split(csv, '\n');
  if (lines.empty() || trim(lines[0]) != "point_id,timestamp,parameter,value")
    throw std::invalid_argument("CSV header must be point_id,timestamp,parameter,value");

  struct Group {
    BaseRecord record;
    std::uint32_t set_mask = 0;
    std::vector<std::size_t> lines;
  };
  std::map<std::pair<std::uint32_t, EpochMs>, Group> groups;
  ImportReport rep;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    auto line = trim(lines[i]);
    if (line.empty()) continue;
    auto reject = [&](std::string reason) { rep.rejected.push_back({line_no, std::move(reason)}); };

    auto cols = split(line, ',');
    if (cols.size() != 4) {
      reject("BAD_COLUMN_COUNT");
      continue;
    }
    std::uint32_t point = 0;
    auto pc = trim(cols[0]);
    auto [pp, pec] = std::from_chars(pc.data(), pc.data() + pc.size(), point);
    if (pec != std::errc{} || pp != pc.data() + pc.size() || pc.empty()) {
      reject("BAD_POINT_ID");
      continue;
    }
    auto ts = parse_timestamp(trim(cols[1]));
    if (!ts) {
      reject("BAD_TIMESTAMP");
      continue;
    }
    auto par = parse_parameter(trim(cols[2]));
    if (!par) {
      reject("UNKNOWN_PARAMETER");
      continue;
    }
    auto value = parse_double(trim(cols[3]));
    if (!value) {
      reject("BAD_VALUE");
      continue;
    }
    if (token && !token->allows(point)) {
      reject("POINT_NOT_AUTHORIZED");
      continue;
    }
    const EpochMs aligned = window_align(*ts, res);
    auto& g = groups[{point, aligned}];
    g.record.point_id = point;
    g.record.ts_ms = aligned;
    g.record.resolution = res;
    set_parameter(g.record, *par, *value);  // later rows overwrite earlier ones
    g.set_mask |= 1u << static_cast<unsigned>(*par);
    g.lines.push_back(line_no);
  }

  std::vector<BaseRecord> accepted;
  const std::uint32_t all = (1u << kParameterCount) - 1;
  for (auto& [key, g] : groups) {
    if (g.set_mask != all) g.record.flags |= record_flags::kIncomplete;
    if (auto why = validate_record(g.record, core_.registry())) {
      for (auto l : g.lines) rep.rejected.push_back({l, std::string(rejection_name(*why))});
      continue;
    }
    rep.accepted += g.lines.size();
    accepted.push_back(g.record);
  }
  std::sort(rep.rejected.begin(), rep.rejected.end(),
            [](const auto& a, const auto& b) { return a.line < b.line; });
  if (!accepted.empty()) core_.import_records(accepted);
  rep.records = accepted.size();
  return rep;
}

}  // namespace gridmon::service
