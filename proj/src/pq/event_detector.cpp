#include "gridmon/pq/event_detector.hpp"

#include <algorithm>
#include <stdexcept>

#include "gridmon/pq/kernels.hpp"

namespace gridmon::pq {

void EventDetectorConfig::validate() const {
  if (!(hysteresis_pu > 0.0)) throw std::invalid_argument("hysteresis must be > 0");
  if (!(interruption_threshold_pu < sag_threshold_pu - hysteresis_pu))
    throw std::invalid_argument("interruption threshold must be below sag - hysteresis");
  if (!(swell_threshold_pu > sag_threshold_pu))
    throw std::invalid_argument("swell threshold must exceed sag threshold");
}

namespace {

void enter(PhaseMode& mode, std::optional<OpenEvent>& open, const EventDetectorConfig& cfg,
           EpochMs ts, double v) {
  if (v < cfg.interruption_threshold_pu)
    mode = PhaseMode::kInInterruption;
  else if (v < cfg.sag_threshold_pu)
    mode = PhaseMode::kInSag;
  else if (v > cfg.swell_threshold_pu)
    mode = PhaseMode::kInSwell;
  else
    return;
  open = OpenEvent{ts, v};
}

}  // namespace

std::vector<PQEvent> detect_events_step(EventDetectorState& state, const EventDetectorConfig& cfg,
                                        EpochMs ts_ms, const std::array<double, 3>& vrms_pu) {
  if (state.last_ts && ts_ms <= *state.last_ts)
    throw PqError(PqErrc::kNonMonotonicTs, "detector timestamps must strictly increase");
  state.last_ts = ts_ms;

  std::vector<PQEvent> closed;
  for (std::size_t k = 0; k < 3; ++k) {
    const double v = vrms_pu[k];
    PhaseMode& mode = state.mode[k];
    std::optional<OpenEvent>& open = state.open[k];

    auto close = [&](EventType type) {
      closed.push_back(PQEvent{state.point_id, type, static_cast<std::uint8_t>(1u << k),
                               open->start_ms, ts_ms, open->extreme_pu});
      mode = PhaseMode::kNormal;
      open.reset();
    };

    switch (mode) {
      case PhaseMode::kNormal:
        enter(mode, open, cfg, ts_ms, v);
        break;
      case PhaseMode::kInSag:
      case PhaseMode::kInInterruption:
        if (v >= cfg.sag_threshold_pu + cfg.hysteresis_pu) {
          close(open->extreme_pu < cfg.interruption_threshold_pu ? EventType::kInterruption
                                                                 : EventType::kSag);
          enter(mode, open, cfg, ts_ms, v);
        } else {
          open->extreme_pu = std::min(open->extreme_pu, v);
          mode = v < cfg.interruption_threshold_pu ? PhaseMode::kInInterruption : PhaseMode::kInSag;
        }
        break;
      case PhaseMode::kInSwell:
        if (v <= cfg.swell_threshold_pu - cfg.hysteresis_pu) {
          close(EventType::kSwell);
          enter(mode, open, cfg, ts_ms, v);
        } else {
          open->extreme_pu = std::max(open->extreme_pu, v);
        }
        break;
    }
  }
  return closed;
}

}  // namespace gridmon::pq
