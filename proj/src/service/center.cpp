#include "gridmon/service/center.hpp"

#include <iostream>

#include "gridmon/common/record_log.hpp"

namespace gridmon::service {

Center::Center(ServeConfig config) : config_(std::move(config)) {
  registry_ = PointRegistry::load_csv(config_.points_file);
  keys_ = wire::Keyring::load_tsv(config_.keys_file);
  tokens_ = TokenTable::load_tsv(config_.tokens_file);

  std::filesystem::create_directories(config_.data_dir);
  store_ = std::make_unique<store::TieredStore>(
      store::StoreOptions{config_.data_dir, config_.fsync, &registry_, {}});
  events_ = std::make_unique<store::EventStore>(config_.data_dir / "events.log", config_.fsync);
  rollup_ = std::make_unique<ingest::Rollup>(
      *store_, static_cast<EpochMs>(config_.rollup_grace_s * 1000.0));
  core_ = std::make_unique<ingest::IngestCore>(registry_, *store_, *events_, *rollup_,
                                               config_.wal_dir, config_.fsync);
  server_ = std::make_unique<ingest::IngestServer>(
      *core_, keys_, ingest::ServerOptions{config_.listen_ingest, config_.data_dir, nullptr});
  api_ = std::make_unique<Api>(*core_, tokens_);
  http_ = std::make_unique<HttpServer>(*api_, config_.listen_http);
}

Center::~Center() { stop(); }

EpochMs Center::now() const {
  return config_.clock == ClockMode::kWall ? wall_.now_ms() : core_->data_clock().now_ms();
}

void Center::start() {
  core_->replay();
  server_->start();
  http_->start();
  {
    std::lock_guard lock(mu_);
    stopping_ = false;
  }
  maintenance_ = std::thread([this] { maintenance_loop(); });
}

void Center::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (maintenance_.joinable()) maintenance_.join();
  if (http_) http_->stop();
  if (server_) server_->stop();
}

MaintenanceReport Center::maintain(EpochMs now, bool demote) {
  MaintenanceReport rep;
  rep.rollups = rollup_->tick(now).size();
  if (demote) {
    const auto window = static_cast<EpochMs>(config_.hot_window_hours * 3600.0 * 1000.0);
    if (now > window) rep.segments_written = store_->demote(now - window).size();
    if (config_.retention_days > 0)
      rep.segments_purged = store_->retention_purge(config_.retention_days, now).size();
  }
  rep.files_imported = scan_watch_dir();
  return rep;
}

// Files dropped into the watch directory take the same path as
// POST /api/v1/import/bulk; each is renamed to .done or .rejected.
std::size_t Center::scan_watch_dir() {
  if (!config_.watch_dir || !std::filesystem::is_directory(*config_.watch_dir)) return 0;
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(*config_.watch_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    auto bytes = read_file(entry.path());
    std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    auto target = entry.path();
    try {
      auto rep = api_->import_csv(text, Resolution::R3S);
      std::cerr << "import " << entry.path().filename().string() << ": accepted " << rep.accepted
                << ", rejected " << rep.rejected.size() << "\n";
      target += ".done";
    } catch (const std::invalid_argument& e) {
      std::cerr << "import " << entry.path().filename().string() << ": " << e.what() << "\n";
      target += ".rejected";
    }
    std::filesystem::rename(entry.path(), target);
    ++n;
  }
  return n;
}

void Center::maintenance_loop() {
  using namespace std::chrono;
  const auto tick = duration_cast<milliseconds>(duration<double>(config_.maintenance_interval_s));
  const auto demote_every = duration_cast<milliseconds>(duration<double>(config_.demote_interval_s));
  auto next_demote = steady_clock::now();
  std::unique_lock lock(mu_);
  while (!stopping_) {
    lock.unlock();
    const bool demote = steady_clock::now() >= next_demote;
    if (demote) next_demote = steady_clock::now() + demote_every;
    try {
      maintain(now(), demote);
    } catch (const std::exception& e) {
      std::cerr << "maintenance: " << e.what() << "\n";
    }
    lock.lock();
    cv_.wait_for(lock, tick, [this] { return stopping_; });
  }
}

}  // namespace gridmon::service
