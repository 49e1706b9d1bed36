#pragma once

#include <cstdint>
#include <filesystem>

#include "gridmon/device/scenario.hpp"

namespace gridmon::tools {

struct DemoSpec {
  std::uint32_t devices = 3;
  std::uint64_t duration_s = 600;
  std::uint64_t key_seed = 42;
  bool injections = true;
  bool fsync = true;
};

device::Scenario demo_scenario(const DemoSpec& spec);

// Writes points.csv, keys.tsv, tokens.tsv, scenario.json and serve.json
// into `dir`. The tokens file grants `demo-admin` everything and
// `demo-reader` read access to point 1 only.
void write_demo(const std::filesystem::path& dir, const DemoSpec& spec);

}  // namespace gridmon::tools
