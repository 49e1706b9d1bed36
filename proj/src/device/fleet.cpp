#include "gridmon/device/fleet.hpp"

#include <thread>

#include "gridmon/device/device.hpp"
#include "gridmon/domain/registry.hpp"

namespace gridmon::device {

bool FleetReport::all_drained() const {
  for (const auto& d : devices)
    if (!d.drained) return false;
  return true;
}

std::uint64_t FleetReport::total_data_frames() const {
  std::uint64_t n = 0;
  for (const auto& d : devices) n += d.data_frames;
  return n;
}

std::uint64_t FleetReport::total_event_frames() const {
  std::uint64_t n = 0;
  for (const auto& d : devices) n += d.event_frames;
  return n;
}

namespace {

void run_device(const Scenario& scenario, const FleetOptions& opt, const DeviceSpec& spec,
                std::chrono::steady_clock::time_point t0, DeviceReport& report) {
  const wire::Key* key = opt.keys->find(spec.point_id);
  if (!key) throw ConfigError("no key for device " + std::to_string(spec.point_id));

  DeviceConfig cfg;
  cfg.device_id = spec.point_id;
  cfg.point_id = spec.point_id;
  cfg.key = *key;
  cfg.journal_dir = opt.journal_dir;
  cfg.durable_journal = opt.durable_journal;
  cfg.nonce_log = opt.nonce_log;
  cfg.detector = opt.detector;
  cfg.keep_outputs = opt.keep_outputs;
  Device dev(scenario, cfg);
  DeviceLink link(dev, opt.center);

  for (std::uint64_t t = 0; t < scenario.duration_s; ++t) {
    if (opt.speed > 0) {
      auto due = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                          std::chrono::duration<double>(static_cast<double>(t) / opt.speed));
      std::this_thread::sleep_until(due);
    }
    dev.step(t);
    if (scenario.link_down(spec.point_id, t)) {
      if (link.connected()) link.disconnect();
    } else {
      if (!link.connected()) link.connect();
      link.pump();
    }
    if (opt.on_step) opt.on_step(spec.point_id, t);
  }
  report.drained = link.drain(opt.drain_timeout);
  link.disconnect();

  report.point_id = spec.point_id;
  report.data_frames = dev.data_frames();
  report.event_frames = dev.event_frames();
  report.frames_sent = link.stats().frames_sent;
  report.retransmissions = link.stats().retransmissions;
  report.connects = link.stats().connects;
  report.acked = link.acked();
  report.records = dev.emitted_records();
  report.events = dev.emitted_events();
}

}  // namespace

FleetReport run_fleet(const Scenario& scenario, const FleetOptions& options) {
  scenario.validate();
  if (!options.keys) throw ConfigError("fleet needs a keyring");
  std::filesystem::create_directories(options.journal_dir);

  FleetReport report;
  report.devices.resize(scenario.devices.size());
  std::vector<std::exception_ptr> errors(scenario.devices.size());
  const auto t0 = std::chrono::steady_clock::now();
  {
    std::vector<std::jthread> threads;
    threads.reserve(scenario.devices.size());
    for (std::size_t i = 0; i < scenario.devices.size(); ++i) {
      threads.emplace_back([&, i] {
        try {
          run_device(scenario, options, scenario.devices[i], t0, report.devices[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }
  report.wall = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - t0);
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return report;
}

}  // namespace gridmon::device
