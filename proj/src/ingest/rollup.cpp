#include "gridmon/ingest/rollup.hpp"

#include "gridmon/pq/aggregate.hpp"

namespace gridmon::ingest {

void Rollup::note(std::uint32_t point_id, EpochMs r3s_ts) {
  std::lock_guard lock(mu_);
  pending_.emplace(window_align(r3s_ts, Resolution::R10MIN), point_id);
}

std::vector<BaseRecord> Rollup::tick(EpochMs now_ms) {
  constexpr EpochMs kWindow = duration_ms(Resolution::R10MIN);
  std::vector<std::pair<EpochMs, std::uint32_t>> due;
  {
    // Claim due windows before reading the store; a concurrent late insert
    // re-marks its window and is picked up by the next tick.
    std::lock_guard lock(mu_);
    auto it = pending_.begin();
    while (it != pending_.end() && it->first + kWindow + grace_ms_ <= now_ms) {
      due.push_back(*it);
      it = pending_.erase(it);
    }
  }

  std::vector<BaseRecord> produced;
  for (const auto& [window, point] : due) {
    auto rows = store_.query_range(point, Resolution::R3S, window, window + kWindow);
    if (rows.empty()) continue;
    BaseRecord agg = pq::aggregate_window(rows, Resolution::R10MIN);
    store_.insert(agg);
    produced.push_back(agg);
  }
  return produced;
}

std::size_t Rollup::pending_windows() const {
  std::lock_guard lock(mu_);
  return pending_.size();
}

}  // namespace gridmon::ingest
