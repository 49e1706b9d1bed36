#include "demo_files.hpp"

#include <fstream>

#include "gridmon/wire/keyring.hpp"

namespace gridmon::tools {

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

device::Scenario demo_scenario(const DemoSpec& spec) {
  device::Scenario s;
  s.seed = 7;
  s.duration_s = spec.duration_s;
  for (std::uint32_t i = 1; i <= spec.devices; ++i) s.devices.push_back({i, 0.005, 230.0});
  if (spec.injections && spec.duration_s >= 300) {
    using device::InjectionKind;
    s.injected.push_back({InjectionKind::kSag, 1, 120, 4, 0.6, 0x7});
    if (spec.devices >= 2) s.injected.push_back({InjectionKind::kSwell, 2, 200, 3, 1.2, 0x1});
    if (spec.devices >= 3) {
      s.injected.push_back({InjectionKind::kInterruption, 3, 240, 2, 0.02, 0x7});
      s.injected.push_back({InjectionKind::kLinkOutage, 3, 150, 30, 0.0, 0x7});
    }
  }
  return s;
}

void write_demo(const std::filesystem::path& dir, const DemoSpec& spec) {
  std::filesystem::create_directories(dir);

  std::string points = "point_id,name,nominal_voltage_v,nominal_frequency_hz\n";
  wire::Keyring keys;
  for (std::uint32_t i = 1; i <= spec.devices; ++i) {
    points += std::to_string(i) + ",farm-" + std::to_string(i) + ",230,50\n";
    keys.add(i, wire::Keyring::derive_demo_key(spec.key_seed, i));
  }
  write_text(dir / "points.csv", points);
  write_text(dir / "keys.tsv", keys.to_tsv());
  write_text(dir / "tokens.tsv",
             "# token\tscopes\tpoints\n"
             "demo-admin\tREAD,EXPORT,IMPORT\t*\n"
             "demo-reader\tREAD\t1\n");
  write_text(dir / "scenario.json", demo_scenario(spec).to_json() + "\n");
  write_text(dir / "serve.json", std::string("{\n") +
                                     "  \"listen_ingest\": \"127.0.0.1:7450\",\n"
                                     "  \"listen_http\": \"127.0.0.1:8080\",\n"
                                     "  \"data_dir\": \"data\",\n"
                                     "  \"points_file\": \"points.csv\",\n"
                                     "  \"keys_file\": \"keys.tsv\",\n"
                                     "  \"tokens_file\": \"tokens.tsv\",\n"
                                     "  \"hot_window_hours\": 48,\n"
                                     "  \"rollup_grace_s\": 30,\n"
                                     "  \"clock\": \"data\",\n"
                                     "  \"fsync\": " + (spec.fsync ? "true" : "false") + "\n}\n");
}

}  // namespace gridmon::tools
