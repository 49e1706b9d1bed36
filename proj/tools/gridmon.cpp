// gridmon: run the center, drive a simulated fleet, query and maintain.
#include <algorithm>
#include <charconv>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "demo_files.hpp"
#include "gridmon/common/time_format.hpp"
#include "gridmon/device/fleet.hpp"
#include "gridmon/service/center.hpp"

using namespace gridmon;

namespace {

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

EpochMs parse_ts_or_throw(const std::string& s, const char* what) {
  auto ts = parse_timestamp(s);
  if (!ts) throw CLI::ValidationError(what, "expected epoch-ms or ISO-8601 UTC, got '" + s + "'");
  return *ts;
}

int cmd_serve(const std::string& config_path, const std::string& watch_dir) {
  auto cfg = service::ServeConfig::load_json(config_path);
  if (!watch_dir.empty()) cfg.watch_dir = std::filesystem::absolute(watch_dir);
  service::Center center(cfg);
  center.start();
  std::cerr << "gridmon: ingest on " << cfg.listen_ingest.host << ":" << center.ingest_port()
            << ", http on " << cfg.listen_http.host << ":" << center.http_port() << "\n";
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  std::cerr << "gridmon: shutting down\n";
  center.stop();
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& endpoint,
                 const std::string& keys_path, const std::string& journal_dir, double speed,
                 bool fsync, double drain_s) {
  auto scenario = device::Scenario::load_json(scenario_path);
  auto keys = wire::Keyring::load_tsv(keys_path);
  device::FleetOptions opt;
  opt.center = net::parse_endpoint(endpoint);
  opt.journal_dir = journal_dir;
  opt.durable_journal = fsync;
  opt.keys = &keys;
  opt.speed = speed;
  opt.drain_timeout = std::chrono::milliseconds(static_cast<long>(drain_s * 1000));

  // Fail fast when nothing listens at the endpoint.
  try {
    net::tcp_connect(opt.center, std::chrono::milliseconds(2000));
  } catch (const std::exception& e) {
    std::cerr << "gridmon: cannot reach " << endpoint << ": " << e.what() << "\n";
    return 1;
  }

  auto rep = device::run_fleet(scenario, opt);
  nlohmann::json out;
  out["devices"] = rep.devices.size();
  out["data_frames"] = rep.total_data_frames();
  out["event_frames"] = rep.total_event_frames();
  std::uint64_t sent = 0, retx = 0;
  for (const auto& d : rep.devices) {
    sent += d.frames_sent;
    retx += d.retransmissions;
  }
  out["frames_sent"] = sent;
  out["retransmissions"] = retx;
  out["all_acknowledged"] = rep.all_drained();
  out["wall_ms"] = rep.wall.count();
  std::cout << out.dump(2) << "\n";
  return rep.all_drained() ? 0 : 1;
}

int cmd_query(const std::string& endpoint, const std::string& token, const std::string& point,
              const std::string& param, const std::string& res, const std::string& from,
              const std::string& to) {
  auto ep = net::parse_endpoint(endpoint);
  httplib::Client cli(ep.host, ep.port);
  cli.set_connection_timeout(5);
  httplib::Params params{{"point", point}, {"param", param}, {"res", res}, {"from", from}, {"to", to}};
  httplib::Headers headers{{"Authorization", "Bearer " + token}};
  auto r = cli.Get("/api/v1/series", params, headers);
  if (!r) {
    std::cerr << "gridmon: cannot reach " << endpoint << ": " << httplib::to_string(r.error()) << "\n";
    return 1;
  }
  if (r->status != 200) {
    std::cerr << "gridmon: HTTP " << r->status << ": " << r->body << "\n";
    return 1;
  }
  auto body = nlohmann::json::parse(r->body);
  std::cout << "ts_ms,value,flags\n";
  char buf[32];
  for (const auto& v : body.at("values")) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v.at(1).get<double>());
    std::cout << v.at(0).get<std::uint64_t>() << "," << std::string_view(buf, ptr - buf) << ","
              << v.at(2).get<int>() << "\n";
  }
  return 0;
}

// Offline: rebuilds the hot tier from the WAL and writes everything older
// than the cutoff into segments. The server must not be running.
int cmd_demote(const std::string& config_path, EpochMs cutoff) {
  auto cfg = service::ServeConfig::load_json(config_path);
  auto registry = PointRegistry::load_csv(cfg.points_file);
  store::TieredStore store({cfg.data_dir, cfg.fsync, &registry, {}});
  store::EventStore events(cfg.data_dir / "events.log", cfg.fsync);
  ingest::Rollup rollup(store);
  ingest::IngestCore core(registry, store, events, rollup, cfg.wal_dir, cfg.fsync);
  core.replay();
  rollup.tick(core.data_clock().now_ms());
  auto files = store.demote(cutoff);
  for (const auto& f : files) std::cout << f.string() << "\n";
  std::cerr << "gridmon: wrote " << files.size() << " segment(s), " << store.hot_record_count()
            << " record(s) remain hot\n";
  return 0;
}

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  auto idx = static_cast<std::size_t>(p * static_cast<double>(v.size() - 1) + 0.5);
  return v[std::min(idx, v.size() - 1)];
}

int cmd_bench(std::uint32_t devices, std::uint64_t minutes, bool fsync, std::size_t queries,
              const std::string& dir_arg) {
  namespace fs = std::filesystem;
  fs::path dir = dir_arg.empty() ? fs::temp_directory_path() / ("gridmon-bench-" + std::to_string(::getpid()))
                                 : fs::path(dir_arg);
  fs::remove_all(dir);
  tools::DemoSpec spec{devices, minutes * 60, 42, false, fsync};
  tools::write_demo(dir, spec);

  auto cfg = service::ServeConfig::load_json(dir / "serve.json");
  cfg.listen_ingest = {"127.0.0.1", 0};
  cfg.listen_http = {"127.0.0.1", 0};
  service::Center center(cfg);
  center.start();

  auto scenario = tools::demo_scenario(spec);
  auto keys = wire::Keyring::load_tsv(dir / "keys.tsv");
  device::FleetOptions opt;
  opt.center = {"127.0.0.1", center.ingest_port()};
  opt.journal_dir = dir / "journal";
  opt.durable_journal = fsync;
  opt.keys = &keys;
  auto rep = device::run_fleet(scenario, opt);
  center.maintain(center.now() + 3600'000, false);

  const auto& c = center.core().counters();
  const double secs = static_cast<double>(rep.wall.count()) / 1000.0;
  std::vector<double> lat;
  std::mt19937_64 rng(1);
  const EpochMs end = scenario.start_ms + scenario.duration_s * 1000;
  for (std::size_t i = 0; i < queries; ++i) {
    service::ApiRequest req;
    req.path = "/api/v1/series";
    req.authorization = "Bearer demo-admin";
    req.query = {{"point", std::to_string(1 + rng() % devices)},
                 {"param", "vrms_pu_l1"},
                 {"res", "3s"},
                 {"from", std::to_string(end > 3600'000 ? end - 3600'000 : 0)},
                 {"to", std::to_string(end)}};
    auto t0 = std::chrono::steady_clock::now();
    auto r = center.api().handle(req);
    lat.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    if (r.status != 200) throw std::runtime_error("bench query failed: " + r.body);
  }

  nlohmann::json out;
  out["devices"] = devices;
  out["simulated_minutes"] = minutes;
  out["fsync"] = fsync;
  out["records"] = c.records.load();
  out["frames"] = c.frames.load();
  out["all_acknowledged"] = rep.all_drained();
  out["ingest_wall_s"] = secs;
  out["records_per_s"] = secs > 0 ? static_cast<double>(c.records.load()) / secs : 0.0;
  out["query_p50_ms"] = percentile(lat, 0.50);
  out["query_p95_ms"] = percentile(lat, 0.95);
  out["query_p99_ms"] = percentile(lat, 0.99);
  center.stop();
  if (dir_arg.empty()) fs::remove_all(dir);
  std::cout << out.dump(2) << "\n";
  return rep.all_drained() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridmon - power-quality monitoring center and device simulator"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "Replay the WAL, then accept device and HTTP traffic");
  std::string config;
  serve->add_option("--config", config, "Serve config (JSON)")->required()->check(CLI::ExistingFile);
  std::string watch_dir;
  serve->add_option("--watch-dir", watch_dir, "Import *.csv files dropped here (overrides watch_dir)")
      ->check(CLI::ExistingDirectory);

  auto* simulate = app.add_subcommand("simulate", "Run a simulated device fleet against a center");
  std::string scenario, endpoint = "127.0.0.1:7450", keys, journal_dir = "journal";
  double speed = 0.0, drain_s = 30.0;
  bool no_fsync = false;
  simulate->add_option("--scenario", scenario, "Scenario (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--endpoint", endpoint, "Center ingest address host:port")->capture_default_str();
  simulate->add_option("--keys", keys, "Device keys (TSV)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--journal-dir", journal_dir, "Device journal directory")->capture_default_str();
  simulate->add_option("--speed", speed, "Simulated seconds per wall second, 0 = unpaced")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--drain-timeout", drain_s, "Seconds to wait for final acks")->check(CLI::PositiveNumber);
  simulate->add_flag("--no-fsync", no_fsync, "Do not fsync device journals");

  auto* query = app.add_subcommand("query", "Fetch one parameter series as CSV");
  std::string http = "127.0.0.1:8080", token, point, param, res = "3s", from, to;
  query->add_option("--endpoint", http, "Center HTTP address host:port")->capture_default_str();
  query->add_option("--token", token, "API token")->envname("GRIDMON_TOKEN")->required();
  query->add_option("--point", point, "Point id")->required();
  query->add_option("--param", param, "Parameter name")->required();
  query->add_option("--res", res, "100ms, 1s, 3s or 10min")->capture_default_str();
  query->add_option("--from", from, "Start (epoch-ms or ISO-8601)")->required();
  query->add_option("--to", to, "End, exclusive")->required();

  auto* demote = app.add_subcommand("demote", "Offline: move records older than a cutoff into segments");
  std::string cutoff;
  demote->add_option("--config", config, "Serve config (JSON)")->required()->check(CLI::ExistingFile);
  demote->add_option("--cutoff", cutoff, "Cutoff (epoch-ms or ISO-8601)")->required();

  auto* bench = app.add_subcommand("bench", "Measure ingest throughput and query latency in-process");
  std::uint32_t devices = 10;
  std::uint64_t minutes = 10;
  std::size_t queries = 1000;
  std::string bench_dir;
  bench->add_option("--devices", devices, "Simulated devices")->check(CLI::Range(1u, 100000u))->capture_default_str();
  bench->add_option("--minutes", minutes, "Simulated minutes")->check(CLI::Range(1ull, 100000ull))->capture_default_str();
  bench->add_option("--queries", queries, "Series queries to time")->capture_default_str();
  bench->add_option("--dir", bench_dir, "Working directory (default: a temporary one)");
  bench->add_flag("--no-fsync", no_fsync, "Disable fsync on WAL and journals");

  auto* init = app.add_subcommand("init-demo", "Write a small demo deployment into a directory");
  std::string demo_dir;
  std::uint32_t demo_devices = 3;
  init->add_option("dir", demo_dir, "Target directory")->required();
  init->add_option("--devices", demo_devices, "Devices")->check(CLI::Range(1u, 100000u))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*serve) return cmd_serve(config, watch_dir);
    if (*simulate) return cmd_simulate(scenario, endpoint, keys, journal_dir, speed, !no_fsync, drain_s);
    if (*query) {
      // Validate locally so bad bounds are a usage error, not an HTTP one.
      parse_ts_or_throw(from, "--from");
      parse_ts_or_throw(to, "--to");
      return cmd_query(http, token, point, param, res, from, to);
    }
    if (*demote) return cmd_demote(config, parse_ts_or_throw(cutoff, "--cutoff"));
    if (*bench) return cmd_bench(devices, minutes, !no_fsync, queries, bench_dir);
    if (*init) {
      tools::write_demo(demo_dir, {demo_devices, 600, 42, true, true});
      std::cout << "demo files written to " << demo_dir << "\n";
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gridmon: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
