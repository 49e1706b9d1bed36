#pragma once

#include <cstdint>
#include <mutex>
#include <set>
#include <utility>
#include <vector>

#include "gridmon/domain/types.hpp"
#include "gridmon/store/tiered_store.hpp"

namespace gridmon::ingest {

/// Derives R10MIN records from stored R3S records. Every R3S insert marks
/// its 10-minute window pending; a tick recomputes each pending window that
/// closed at least `grace_ms` ago, so late data re-triggers the window and
/// the latest computation wins.
class Rollup {
 public:
  static constexpr EpochMs kDefaultGraceMs = 30'000;

  explicit Rollup(store::TieredStore& store, EpochMs grace_ms = kDefaultGraceMs)
      : store_(store), grace_ms_(grace_ms) {}

  void note(std::uint32_t point_id, EpochMs r3s_ts);

  // Returns the R10MIN records inserted by this call.
  std::vector<BaseRecord> tick(EpochMs now_ms);

  std::size_t pending_windows() const;
  EpochMs grace_ms() const { return grace_ms_; }

 private:
  store::TieredStore& store_;
  EpochMs grace_ms_;
  mutable std::mutex mu_;
  std::set<std::pair<EpochMs, std::uint32_t>> pending_;  // (window start, point)
};

}  // namespace gridmon::ingest
