#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gridmon/domain/types.hpp"

namespace gridmon::pq {

struct EventDetectorConfig {
  double sag_threshold_pu = 0.9;
  double swell_threshold_pu = 1.1;
  double interruption_threshold_pu = 0.1;
  double hysteresis_pu = 0.02;

  // Throws std::invalid_argument unless
  // interruption < sag - hysteresis, swell > sag, hysteresis > 0.
  void validate() const;
};

enum class PhaseMode : std::uint8_t { kNormal, kInSag, kInSwell, kInInterruption };

struct OpenEvent {
  EpochMs start_ms = 0;
  double extreme_pu = 0.0;
};

/// Streaming detector state for one point. `open[k]` is engaged exactly
/// when `mode[k] != kNormal`.
struct EventDetectorState {
  std::uint32_t point_id = 0;
  std::array<PhaseMode, 3> mode{PhaseMode::kNormal, PhaseMode::kNormal, PhaseMode::kNormal};
  std::array<std::optional<OpenEvent>, 3> open{};
  std::optional<EpochMs> last_ts;
};

// Advances the per-phase state machines by one RMS sample and returns the
// events closed by it (at most one per phase, phases in order L1..L3).
//
// A dip opens below the sag threshold and closes at the first sample at or
// above sag + hysteresis. While open it moves between sag and interruption
// mode as the level crosses the interruption threshold; the closed event is
// an INTERRUPTION if its minimum fell below that threshold, otherwise a SAG.
// A swell opens above the swell threshold and closes at or below
// swell - hysteresis. A closing sample is re-evaluated as a fresh entry,
// so a dip can be followed by a swell that starts on the same timestamp.
//
// Throws PqError(kNonMonotonicTs) if ts_ms does not increase.
std::vector<PQEvent> detect_events_step(EventDetectorState& state, const EventDetectorConfig& cfg,
                                        EpochMs ts_ms, const std::array<double, 3>& vrms_pu);

}  // namespace gridmon::pq
