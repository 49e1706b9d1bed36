// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "gridmon/device/device.hpp"
#include "gridmon/device/fleet.hpp"
#include "gridmon/ingest/ingest_core.hpp"
#include "gridmon/ingest/server.hpp"
#include "gridmon/pq/aggregate.hpp"
#include "gridmon/pq/kernels.hpp"
#include "gridmon/service/api.hpp"
#include "gridmon/wire/batch.hpp"
#include "gridmon/wire/keyring.hpp"
#include "support/oracles.hpp"
#include "support/process.hpp"
#include "support/temp_dir.hpp"

using namespace gridmon;
using namespace gridmon::testing;
using Steady = std::chrono::steady_clock;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Steady::time_point t0) {
  return std::chrono::duration<double>(Steady::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(prec);
  o << v;
  return o.str();
}

PointRegistry registry_of(std::uint32_t n) {
  std::string csv = "point_id,name,nominal_voltage_v,nominal_frequency_hz\n";
  for (std::uint32_t i = 1; i <= n; ++i) csv += std::to_string(i) + ",p" + std::to_string(i) + ",230,50\n";
  return PointRegistry::parse_csv(csv);
}

// Each deployment gets its own keys, as provisioning would.
wire::Keyring keyring_of(std::uint32_t n, std::uint64_t seed) {
  wire::Keyring k;
  for (std::uint32_t i = 1; i <= n; ++i) k.add(i, wire::Keyring::derive_demo_key(seed, i));
  return k;
}

// In-process center: the same ingest stack `gridmon serve` builds.
struct Center {
  Center(const std::filesystem::path& dir, std::uint32_t points, std::uint64_t key_seed, bool durable,
         wire::NonceLog* nonces)
      : registry(registry_of(points)),
        keys(keyring_of(points, key_seed)),
        store({dir / "data", durable, &registry, {}}),
        events(dir / "data" / "events.log", durable),
        rollup(store),
        core(registry, store, events, rollup, dir / "wal", durable),
        state_dir(dir / "data"),
        nonces(nonces) {
    core.replay();
    start_server();
  }
  void start_server() {
    server = std::make_unique<ingest::IngestServer>(core, keys, ingest::ServerOptions{{"127.0.0.1", 0}, state_dir, nonces});
    server->start();
  }
  void restart_server() {
    server->stop();
    server.reset();
    start_server();
  }

  PointRegistry registry;
  wire::Keyring keys;
  store::TieredStore store;
  store::EventStore events;
  ingest::Rollup rollup;
  ingest::IngestCore core;
  std::filesystem::path state_dir;
  wire::NonceLog* nonces;
  std::unique_ptr<ingest::IngestServer> server;
};

device::Scenario fleet_scenario(std::uint32_t devices, std::uint64_t duration_s, std::uint64_t seed) {
  device::Scenario s;
  s.seed = seed;
  s.duration_s = duration_s;
  for (std::uint32_t i = 1; i <= devices; ++i) s.devices.push_back({i, 0.01, 230.0});
  return s;
}

// Compares every stored R3S/R10MIN series against the deterministic
// simulator output. Returns a description of the first mismatch.
std::string compare_with_simulator(const store::TieredStore& store, const device::Scenario& s,
                                   std::size_t& r3s_total, std::size_t& r10_total) {
  r3s_total = r10_total = 0;
  for (const auto& d : s.devices) {
    auto got3 = store.query_range(d.point_id, Resolution::R3S, 0, ~0ull);
    auto got10 = store.query_range(d.point_id, Resolution::R10MIN, 0, ~0ull);
    r3s_total += got3.size();
    r10_total += got10.size();
    if (!same_records(got3, expected_r3s(s, d.point_id)))
      return "R3S mismatch for point " + std::to_string(d.point_id) + " (" + std::to_string(got3.size()) + " rows)";
    if (!same_records(got10, expected_r10min(s, d.point_id)))
      return "R10MIN mismatch for point " + std::to_string(d.point_id) + " (" + std::to_string(got10.size()) + " rows)";
  }
  return {};
}

wire::NonceLog g_nonces;  // shared by every protocol run below, checked in criterion 6
std::size_t g_protocol_runs = 0;

// 1. End-to-end fidelity at 100 devices x 10 simulated minutes.
Outcome end_to_end() {
  TempDir dir;
  const auto t0 = Steady::now();
  Center c(dir.path(), 100, 101, true, &g_nonces);
  auto s = fleet_scenario(100, 600, 11);
  device::FleetOptions opt;
  opt.center = {"127.0.0.1", c.server->port()};
  opt.journal_dir = dir / "journal";
  opt.keys = &c.keys;
  opt.nonce_log = &g_nonces;
  auto rep = device::run_fleet(s, opt);
  // Virtual clock: advance past the last window's close plus grace.
  c.rollup.tick(c.core.data_clock().now_ms() + c.rollup.grace_ms());
  const double wall = seconds_since(t0);
  ++g_protocol_runs;

  std::size_t r3s = 0, r10 = 0;
  auto mismatch = compare_with_simulator(c.store, s, r3s, r10);
  Outcome o;
  o.pass = rep.all_drained() && mismatch.empty() && r3s == 100 * 200 && r10 == 100 && wall < 60.0;
  o.detail = std::to_string(r3s) + " R3S, " + std::to_string(r10) + " R10MIN, field-exact " +
             (mismatch.empty() ? "yes" : "no: " + mismatch) + ", wall " + fmt(wall, 2) + " s";
  return o;
}

// 2. Every device loses its link for 30 simulated seconds.
Outcome outage_recovery() {
  TempDir dir;
  Center c(dir.path(), 20, 102, true, &g_nonces);
  auto s = fleet_scenario(20, 600, 12);
  for (std::uint32_t i = 1; i <= 20; ++i)
    s.injected.push_back({device::InjectionKind::kLinkOutage, i, 60 + 20ull * i, 30, 0, 0x7});
  // A few electrical events so EVENT frames also cross outages.
  s.injected.push_back({device::InjectionKind::kSag, 3, 95, 4, 0.5, 0x7});
  s.injected.push_back({device::InjectionKind::kSwell, 7, 200, 5, 1.25, 0x2});
  device::FleetOptions opt;
  opt.center = {"127.0.0.1", c.server->port()};
  opt.journal_dir = dir / "journal";
  opt.keys = &c.keys;
  opt.nonce_log = &g_nonces;
  opt.keep_outputs = true;
  auto rep = device::run_fleet(s, opt);
  c.rollup.tick(c.core.data_clock().now_ms() + c.rollup.grace_ms());
  ++g_protocol_runs;

  std::size_t r3s = 0, r10 = 0;
  auto mismatch = compare_with_simulator(c.store, s, r3s, r10);
  std::size_t missing = 0, visible_dups = 0, reconnects = 0;
  std::size_t events_expected = 0, events_stored = 0;
  for (const auto& d : rep.devices) {
    auto got = c.store.query_range(d.point_id, Resolution::R3S, 0, ~0ull);
    std::set<EpochMs> seen;
    for (const auto& r : got)
      if (!seen.insert(r.ts_ms).second) ++visible_dups;
    for (const auto& r : expected_r3s(s, d.point_id))
      if (!seen.count(r.ts_ms)) ++missing;
    reconnects += d.connects > 0 ? d.connects - 1 : 0;
    events_expected += d.events.size();
    events_stored += c.events.query(d.point_id, 0, ~0ull).size();
  }
  Outcome o;
  o.pass = rep.all_drained() && mismatch.empty() && missing == 0 && visible_dups == 0 && reconnects >= 20 &&
           events_expected == events_stored && events_expected > 0;
  o.detail = "missing " + std::to_string(missing) + ", visible duplicates " + std::to_string(visible_dups) +
             ", duplicate deliveries " + std::to_string(c.core.counters().duplicates.load()) + ", reconnects " +
             std::to_string(reconnects) + ", events " + std::to_string(events_stored) + "/" +
             std::to_string(events_expected) + (mismatch.empty() ? "" : ", " + mismatch);
  return o;
}

BaseRecord random_input(std::mt19937_64& rng, std::uint32_t point, EpochMs ts, Resolution res) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BaseRecord r;
  r.point_id = point;
  r.ts_ms = ts;
  r.resolution = res;
  r.flags = rng() % 50 == 0 ? record_flags::kClockUnsynced : 0;
  r.frequency_hz = 49.5 + u(rng);
  for (int k = 0; k < 3; ++k) {
    r.vrms_pu[k] = 0.05 + 1.3 * u(rng);
    r.irms_a[k] = 40 * u(rng);
    r.thd_v[k] = 0.1 * u(rng);
  }
  r.p_w = 20000 * (u(rng) - 0.3);
  r.q_var = 8000 * (u(rng) - 0.5);
  r.s_va = 30000 * u(rng);
  r.unbalance = 0.05 * u(rng);
  r.flicker_pst = 2 * u(rng);
  return r;
}

bool close_all(const BaseRecord& got, const BaseRecord& want, double tol, double& worst) {
  if (got.flags != want.flags || got.ts_ms != want.ts_ms || got.resolution != want.resolution) return false;
  bool ok = true;
  for (std::size_t p = 0; p < kParameterCount; ++p) {
    const double a = parameter_value(got, static_cast<Parameter>(p));
    const double b = parameter_value(want, static_cast<Parameter>(p));
    const double scale = std::max(std::fabs(a), std::fabs(b));
    const double rel = scale == 0 ? 0 : std::fabs(a - b) / scale;
    worst = std::max(worst, rel);
    ok = ok && rel <= tol;
  }
  return ok;
}

// 3. Aggregates vs one-pass brute force on 10^4 random windows.
Outcome aggregation() {
  std::mt19937_64 rng(13);
  std::size_t windows = 0, failures = 0;
  double worst = 0;
  const EpochMs base = 1'700'000'400'000;
  for (int w = 0; w < 5000; ++w) {  // 3 s from 1 s inputs, with gaps
    const EpochMs start = base + 3000ull * static_cast<EpochMs>(rng() % 1'000'000);
    std::vector<BaseRecord> in;
    for (int i = 0; i < 3; ++i)
      if (rng() % 6 != 0) in.push_back(random_input(rng, 1, start + 1000ull * i, Resolution::R1S));
    if (in.empty()) in.push_back(random_input(rng, 1, start + 2000, Resolution::R1S));
    ++windows;
    if (!close_all(pq::aggregate_window(in, Resolution::R3S), oracle_aggregate(in, start, Resolution::R3S), 1e-9, worst))
      ++failures;
  }
  for (int w = 0; w < 4000; ++w) {  // 10 min from 3 s inputs, with gaps
    const EpochMs start = base + 600000ull * static_cast<EpochMs>(rng() % 100'000);
    std::vector<BaseRecord> in;
    const int drop_one_in = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < 200; ++i)
      if (rng() % static_cast<std::uint64_t>(drop_one_in + 1) != 0 || drop_one_in == 1)
        in.push_back(random_input(rng, 2, start + 3000ull * i, Resolution::R3S));
    ++windows;
    if (!close_all(pq::aggregate_window(in, Resolution::R10MIN), oracle_aggregate(in, start, Resolution::R10MIN), 1e-9,
                   worst))
      ++failures;
  }
  for (int w = 0; w < 1000; ++w) {  // 10 min composed from full 1 s -> 3 s -> 10 min
    const EpochMs start = base + 600000ull * static_cast<EpochMs>(rng() % 100'000);
    std::vector<BaseRecord> ones, threes;
    for (int i = 0; i < 600; ++i) ones.push_back(random_input(rng, 3, start + 1000ull * i, Resolution::R1S));
    for (int i = 0; i < 200; ++i)
      threes.push_back(pq::aggregate_window(std::span(ones).subspan(3 * i, 3), Resolution::R3S));
    auto composed = pq::aggregate_window(threes, Resolution::R10MIN);
    auto want = oracle_aggregate(ones, start, Resolution::R10MIN);
    ++windows;
    if (!close_all(composed, want, 1e-9, worst)) ++failures;
  }
  return {failures == 0 && windows >= 10000,
          std::to_string(windows) + " windows, " + std::to_string(failures) + " outside 1e-9, worst relative error " +
              [&] {
                std::ostringstream o;
                o << worst;
                return o.str();
              }()};
}

Bytes encode_rows(const std::vector<BaseRecord>& rows) {
  Bytes out;
  ByteWriter w(out);
  for (const auto& r : rows) wire::encode_record(r, w);
  return out;
}

// 4. Random insert/demote/query interleavings against a flat map.
Outcome store_equivalence() {
  TempDir dir;
  store::TieredStore s({dir.path(), false, nullptr, {}});
  FlatStore flat;
  std::mt19937_64 rng(14);
  std::size_t ops = 0, inserts = 0, demotes = 0, queries = 0, mismatches = 0, rows_compared = 0;
  EpochMs cutoff = 0;
  constexpr EpochMs kSpan = 200'000'000;
  for (; ops < 120'000; ++ops) {
    const auto k = rng() % 1000;
    if (k < 600) {
      const auto res = kAllResolutions[rng() % 4];
      // Bias toward recent timestamps so demotion races fresh inserts.
      const EpochMs ts = window_align(rng() % 2 ? rng() % kSpan : cutoff + rng() % 5'000'000, res);
      auto r = random_input(rng, 1 + static_cast<std::uint32_t>(rng() % 8), ts, res);
      s.insert(r);
      flat.insert(r);
      ++inserts;
    } else if (k < 601) {
      cutoff = std::min<EpochMs>(kSpan, cutoff + rng() % 4'000'000);
      s.demote(cutoff);
      ++demotes;
    } else {
      const auto res = kAllResolutions[rng() % 4];
      const auto p = 1 + static_cast<std::uint32_t>(rng() % 9);
      EpochMs a = rng() % kSpan, b = a + rng() % (rng() % 4 == 0 ? kSpan : 3'000'000);
      auto got = s.query_range(p, res, a, b);
      auto want = flat.query(p, res, a, b);
      rows_compared += want.size();
      if (encode_rows(got) != encode_rows(want)) ++mismatches;
      ++queries;
    }
  }
  // Full sweep at the end.
  for (std::uint32_t p = 1; p <= 8; ++p)
    for (auto res : kAllResolutions) {
      auto got = s.query_range(p, res, 0, ~0ull);
      auto want = flat.query(p, res, 0, ~0ull);
      rows_compared += want.size();
      if (encode_rows(got) != encode_rows(want)) ++mismatches;
    }
  return {mismatches == 0 && ops >= 100'000,
          std::to_string(ops) + " ops (" + std::to_string(inserts) + " inserts, " + std::to_string(demotes) +
              " demotions, " + std::to_string(queries) + " queries), " + std::to_string(s.segment_count()) +
              " segments, " + std::to_string(rows_compared) + " rows compared, " + std::to_string(mismatches) +
              " mismatches"};
}

// 5. Streaming detector vs whole-trace oracle on 1000 traces.
Outcome event_detection() {
  std::mt19937_64 rng(15);
  pq::EventDetectorConfig cfg;
  std::size_t traces = 0, mismatched = 0, events = 0;
  std::map<EventType, std::size_t> by_type;
  for (; traces < 1000; ++traces) {
    const std::size_t n = 200 + rng() % 800;
    std::vector<EpochMs> ts(n);
    for (std::size_t i = 0; i < n; ++i) ts[i] = 1'700'000'000'000 + 1000 * i;
    std::array<std::vector<double>, 3> v;
    std::normal_distribution<double> noise(0.0, 0.004);
    for (auto& phase : v) {
      phase.assign(n, 1.0);
      for (auto& x : phase) x += noise(rng);
      // Inject rectangular and ramped disturbances.
      const int injections = static_cast<int>(rng() % 6);
      for (int j = 0; j < injections; ++j) {
        const std::size_t at = rng() % n, len = 1 + rng() % 30;
        double depth = 0;
        switch (rng() % 4) {
          case 0: depth = 0.1 + (rng() % 780) / 1000.0; break;   // sag
          case 1: depth = (rng() % 99) / 1000.0; break;          // interruption
          case 2: depth = 1.11 + (rng() % 300) / 1000.0; break;  // swell
          case 3: depth = 0.895 + (rng() % 30) / 1000.0; break;  // hovering at the threshold
        }
        const bool ramp = rng() % 3 == 0;
        for (std::size_t i = at; i < std::min(n, at + len); ++i) {
          const double f = ramp ? static_cast<double>(i - at + 1) / static_cast<double>(len) : 1.0;
          phase[i] = 1.0 + (depth - 1.0) * f + noise(rng);
          if (phase[i] < 0) phase[i] = 0;
        }
      }
    }
    const auto point = static_cast<std::uint32_t>(1 + traces);
    auto got = stream_events(point, ts, v, cfg);
    std::vector<PQEvent> want;
    for (int k = 0; k < 3; ++k) {
      auto e = oracle_phase_events(point, k, ts, v[static_cast<std::size_t>(k)], cfg);
      want.insert(want.end(), e.begin(), e.end());
    }
    sort_events(got);
    sort_events(want);
    if (got != want) ++mismatched;
    events += want.size();
    for (const auto& e : want) ++by_type[e.type];
  }
  return {mismatched == 0 && by_type[EventType::kSag] > 0 && by_type[EventType::kSwell] > 0 &&
              by_type[EventType::kInterruption] > 0,
          std::to_string(traces) + " traces, " + std::to_string(events) + " events (" +
              std::to_string(by_type[EventType::kSag]) + " sag, " + std::to_string(by_type[EventType::kSwell]) +
              " swell, " + std::to_string(by_type[EventType::kInterruption]) + " interruption), " +
              std::to_string(mismatched) + " mismatched traces"};
}

// 6. Frame round trip, single-bit tamper rejection, nonce uniqueness.
Outcome protocol_security() {
  std::mt19937_64 rng(16);
  std::size_t frames = 0, roundtrip_failures = 0, mutations = 0, accepted_mutations = 0;
  for (; frames < 10'000; ++frames) {
    wire::Key key;
    for (auto& b : key) b = static_cast<std::uint8_t>(rng());
    wire::FrameHeader h{static_cast<wire::FrameType>(1 + rng() % 5), static_cast<std::uint32_t>(rng()), rng(), 0};
    Bytes payload(rng() % 49);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
    auto sealed = wire::seal_frame(h, payload, key);
    wire::KeyLookup lookup = [&](std::uint32_t id) -> const wire::Key* { return id == h.device_id ? &key : nullptr; };
    auto opened = wire::open_frame(sealed, lookup);
    h.payload_len = static_cast<std::uint32_t>(payload.size() + wire::kTagSize);
    if (!opened || !(opened->header == h) || opened->payload != payload) ++roundtrip_failures;
    for (std::size_t bit = 0; bit < sealed.size() * 8; ++bit) {
      sealed[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      ++mutations;
      if (wire::open_frame(sealed, lookup)) ++accepted_mutations;
      sealed[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    }
  }

  // Nonce freshness across device and server restarts: three rounds of the
  // same fleet, restarting the center's listener in between, on top of the
  // runs recorded by the earlier criteria.
  TempDir dir;
  {
    Center c(dir.path(), 5, 106, false, &g_nonces);
    auto s = fleet_scenario(5, 90, 17);
    for (int round = 0; round < 3; ++round) {
      device::FleetOptions opt;
      opt.center = {"127.0.0.1", c.server->port()};
      opt.journal_dir = dir / "journal";
      opt.durable_journal = false;
      opt.keys = &c.keys;
      opt.nonce_log = &g_nonces;
      device::run_fleet(s, opt);
      c.restart_server();
      ++g_protocol_runs;
    }
  }
  const bool pass = roundtrip_failures == 0 && accepted_mutations == 0 && g_nonces.duplicates() == 0 &&
                    g_nonces.size() > 0;
  return {pass, std::to_string(frames) + " frames, " + std::to_string(roundtrip_failures) + " round-trip failures, " +
                    std::to_string(mutations) + " single-bit mutations, " + std::to_string(accepted_mutations) +
                    " accepted; nonce log " + std::to_string(g_nonces.size()) + " seals over " +
                    std::to_string(g_protocol_runs) + " protocol runs, " + std::to_string(g_nonces.duplicates()) +
                    " duplicate (key, nonce) pairs"};
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// CSV lines (without header) the export endpoint must return for `rows`.
std::vector<std::string> export_lines(const std::vector<BaseRecord>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    std::string line = std::to_string(r.ts_ms);
    for (std::size_t i = 0; i < kParameterCount; ++i) line += "," + format_double(parameter_value(r, static_cast<Parameter>(i)));
    line += "," + std::to_string(r.flags);
    out.push_back(line);
  }
  return out;
}

std::optional<std::vector<std::string>> fetch_export(std::uint16_t http, std::uint32_t point) {
  httplib::Client cli("127.0.0.1", http);
  cli.set_read_timeout(10);
  auto r = cli.Get("/api/v1/export?token=acc&res=3s&from=0&to=99999999999999&point=" + std::to_string(point));
  if (!r || r->status != 200) return std::nullopt;
  std::vector<std::string> lines;
  std::istringstream in(r->body);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

// 7. SIGKILL the center right after acks at 20 random points.
Outcome crash_safety() {
  TempDir dir;
  constexpr std::uint32_t kDevices = 5;
  const auto ingest_port = free_port();
  const auto http_port = free_port();
  write_text(dir / "points.csv", [&] {
    std::string s = "point_id,name,nominal_voltage_v,nominal_frequency_hz\n";
    for (std::uint32_t i = 1; i <= kDevices; ++i) s += std::to_string(i) + ",p,230,50\n";
    return s;
  }());
  auto keys = keyring_of(kDevices, 107);
  write_text(dir / "keys.tsv", keys.to_tsv());
  write_text(dir / "tokens.tsv", "acc\tREAD,EXPORT\t*\n");
  write_text(dir / "serve.json", json{{"listen_ingest", "127.0.0.1:" + std::to_string(ingest_port)},
                                      {"listen_http", "127.0.0.1:" + std::to_string(http_port)},
                                      {"data_dir", "data"},
                                      {"clock", "data"},
                                      {"fsync", true}}
                                     .dump());
  const std::vector<std::string> serve{GRIDMON_BIN, "serve", "--config", (dir / "serve.json").string()};
  auto server = std::make_unique<Child>(serve, dir / "serve.log");
  if (!wait_for_port(http_port, std::chrono::seconds(10))) return {false, "server did not start"};

  auto s = fleet_scenario(kDevices, 600, 18);
  s.injected.push_back({device::InjectionKind::kSag, 2, 100, 5, 0.4, 0x7});
  s.injected.push_back({device::InjectionKind::kInterruption, 4, 300, 3, 0.01, 0x5});

  std::vector<std::unique_ptr<device::Device>> devices;
  std::vector<std::unique_ptr<device::DeviceLink>> links;
  // seq -> R3S record carried, per device.
  std::vector<std::map<std::uint64_t, BaseRecord>> carried(kDevices);
  for (std::uint32_t i = 1; i <= kDevices; ++i) {
    device::DeviceConfig cfg;
    cfg.device_id = cfg.point_id = i;
    cfg.key = *keys.find(i);
    cfg.journal_dir = dir / "journal";
    cfg.keep_outputs = true;
    devices.push_back(std::make_unique<device::Device>(s, cfg));
    links.push_back(std::make_unique<device::DeviceLink>(*devices.back(), net::Endpoint{"127.0.0.1", ingest_port},
                                                         std::chrono::milliseconds(2000)));
  }

  std::mt19937_64 rng(19);
  std::set<std::uint64_t> kill_at;
  while (kill_at.size() < 20) kill_at.insert(5 + rng() % 590);

  std::size_t kills = 0, lost_after_restart = 0, checked = 0;
  for (std::uint64_t t = 0; t < s.duration_s; ++t) {
    for (std::uint32_t i = 0; i < kDevices; ++i) {
      for (const auto& f : devices[i]->step(t))
        if (f.type == wire::FrameType::kData) carried[i][f.seq] = devices[i]->emitted_records().back();
      if (!links[i]->connected()) links[i]->connect();
      links[i]->pump();
    }
    if (!kill_at.count(t)) continue;

    // Wait for a fresh ack on a random device, then kill immediately.
    const auto victim = static_cast<std::size_t>(rng() % kDevices);
    const auto before = links[victim]->acked();
    const auto deadline = Steady::now() + std::chrono::seconds(5);
    while (links[victim]->acked() == before && devices[victim]->journal().pending() > 0 && Steady::now() < deadline) {
      links[victim]->pump();
      std::this_thread::sleep_for(std::chrono::microseconds(200));
    }
    std::vector<std::uint64_t> acked(kDevices);
    for (std::uint32_t i = 0; i < kDevices; ++i) acked[i] = links[i]->acked();
    server->kill_hard();
    ++kills;
    for (auto& l : links) l->disconnect();

    server = std::make_unique<Child>(serve, dir / "serve.log");
    if (!wait_for_port(http_port, std::chrono::seconds(10))) return {false, "server did not restart"};
    // Every acknowledged record must be back after WAL replay.
    for (std::uint32_t i = 0; i < kDevices; ++i) {
      auto lines = fetch_export(http_port, i + 1);
      if (!lines) return {false, "export failed after restart"};
      std::set<std::string> present(lines->begin(), lines->end());
      for (const auto& [seq, rec] : carried[i]) {
        if (seq > acked[i]) break;
        ++checked;
        if (!present.count(export_lines({rec}).front())) ++lost_after_restart;
      }
    }
  }
  for (auto& l : links) l->drain(std::chrono::seconds(20));

  // Final state: exactly the simulator's output, once each.
  std::size_t mismatched_points = 0, events_expected = 0, events_stored = 0;
  for (std::uint32_t i = 0; i < kDevices; ++i) {
    auto lines = fetch_export(http_port, i + 1);
    if (!lines || *lines != export_lines(expected_r3s(s, i + 1))) ++mismatched_points;
    events_expected += devices[i]->emitted_events().size();
    httplib::Client cli("127.0.0.1", http_port);
    auto r = cli.Get("/api/v1/events?token=acc&point=" + std::to_string(i + 1));
    if (r && r->status == 200) events_stored += json::parse(r->body).size();
  }
  server->terminate();
  const bool pass = kills == 20 && lost_after_restart == 0 && mismatched_points == 0 &&
                    events_expected == events_stored && checked > 0;
  return {pass, std::to_string(kills) + " kills, " + std::to_string(checked) + " acked-record checks, " +
                    std::to_string(lost_after_restart) + " lost, " + std::to_string(mismatched_points) +
                    " points differing from simulator at end, events " + std::to_string(events_stored) + "/" +
                    std::to_string(events_expected)};
}

// 8. Last-hour query latency with 10^6 hot records.
Outcome query_latency() {
  TempDir dir;
  auto registry = registry_of(100);
  store::TieredStore store({dir / "data", false, &registry, {}});
  store::EventStore events;
  ingest::Rollup rollup(store);
  ingest::IngestCore core(registry, store, events, rollup, dir / "wal", false);
  auto tokens = service::TokenTable::parse_tsv("t\tREAD\t*\n");
  service::Api api(core, tokens);

  std::mt19937_64 rng(20);
  const EpochMs start = 1'700'000'400'000;
  constexpr std::size_t kPerPoint = 10'000;
  std::vector<BaseRecord> batch;
  for (std::uint32_t p = 1; p <= 100; ++p) {
    batch.clear();
    for (std::size_t i = 0; i < kPerPoint; ++i) batch.push_back(random_input(rng, p, start + 3000 * i, Resolution::R3S));
    store.insert_many(batch);
  }
  const EpochMs end = start + 3000 * kPerPoint;

  std::vector<double> store_ms, api_ms;
  std::size_t rows = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = 1 + static_cast<std::uint32_t>(rng() % 100);
    auto t0 = Steady::now();
    auto got = store.query_range(p, Resolution::R3S, end - 3'600'000, end);
    store_ms.push_back(std::chrono::duration<double, std::milli>(Steady::now() - t0).count());
    rows = got.size();

    service::ApiRequest req;
    req.path = "/api/v1/series";
    req.authorization = "Bearer t";
    req.query = {{"point", std::to_string(p)}, {"param", "vrms_pu_l1"}, {"res", "3s"},
                 {"from", std::to_string(end - 3'600'000)}, {"to", std::to_string(end)}};
    t0 = Steady::now();
    auto r = api.handle(req);
    api_ms.push_back(std::chrono::duration<double, std::milli>(Steady::now() - t0).count());
    if (r.status != 200) return {false, "API query failed"};
  }
  std::sort(store_ms.begin(), store_ms.end());
  std::sort(api_ms.begin(), api_ms.end());
  const double median_api = api_ms[api_ms.size() / 2];
  const double median_store = store_ms[store_ms.size() / 2];
  return {store.hot_record_count() == 1'000'000 && rows == 1200 && median_api < 10.0,
          std::to_string(store.hot_record_count()) + " hot records, " + std::to_string(rows) +
              " rows per query, median " + fmt(median_store) + " ms (store) / " + fmt(median_api) +
              " ms (API incl. JSON), p99 API " + fmt(api_ms[api_ms.size() * 99 / 100]) + " ms"};
}

// 9. PQ kernel golden values.
Outcome golden_values() {
  const auto u2 = pq::symmetrical_unbalance({1, 0}, {1, -120}, {0, 0}).u2;
  std::vector<pq::Harmonic> h{{3, 3}, {4, 4}};
  const double t = pq::thd(100, h);
  pq::Phasor z(0, 0);
  auto pt = pq::power_triplet({pq::Phasor(230, 0), z, z}, {pq::Phasor(10, -60), z, z});
  const double q_ref = 1991.858428704209;  // 2300 * sin(60 deg)
  const bool pass = rel_close(u2, 0.5, 1e-9) && rel_close(t, 0.05, 1e-9) && rel_close(pt.p_w, 1150, 1e-9) &&
                    rel_close(pt.q_var, q_ref, 1e-9) && rel_close(pt.s_va, 2300, 1e-9);
  std::ostringstream o;
  o.precision(15);
  o << "u2 " << u2 << ", thd " << t << ", power (" << pt.p_w << ", " << pt.q_var << ", " << pt.s_va << ")";
  return {pass, o.str()};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "end-to-end fidelity", end_to_end},
      {2, "outage recovery", outage_recovery},
      {3, "aggregation correctness", aggregation},
      {4, "tiered-store equivalence", store_equivalence},
      {5, "event detection", event_detection},
      {6, "protocol security", protocol_security},
      {7, "crash safety", crash_safety},
      {8, "query latency", query_latency},
      {9, "kernel golden values", golden_values},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = Steady::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << c.id << " (" << c.name << "): " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail
              << " [" << fmt(seconds_since(t0), 1) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
