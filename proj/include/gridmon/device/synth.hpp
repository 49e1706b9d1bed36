#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "gridmon/device/scenario.hpp"
#include "gridmon/domain/types.hpp"

namespace gridmon::device {

struct SynthSample {
  BaseRecord record;             // R1S record at start_ms + t_s * 1000
  std::array<double, 3> vrms_pu; // instantaneous per-phase RMS fed to the detector
};

// Generator seeded from (scenario seed, point, second) only, so any second
// can be regenerated independently.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint32_t point_id, std::uint64_t t_s);

// Nominal 1.0 pu per phase plus N(0, sigma) noise, frequency 50 Hz plus a
// uniform deviation of at most 2*sigma Hz (+-0.01 Hz at the default sigma),
// THD uniform in [0.01, 0.03]. Phases under an active injected event take
// the injected depth exactly. Currents follow a constant-impedance load, and
// powers and unbalance come from the pq kernels.
SynthSample synthesize_base_record(const Scenario& scenario, std::uint32_t point_id,
                                   std::uint64_t t_s);

}  // namespace gridmon::device
