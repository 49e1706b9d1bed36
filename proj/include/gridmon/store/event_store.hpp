#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <tuple>
#include <vector>

#include "gridmon/common/record_log.hpp"
#include "gridmon/domain/types.hpp"

namespace gridmon::store {

/// Append-only log of detected PQ events with an in-memory index by
/// (point, start). Events identical in (point, type, phase_mask, start, end)
/// are stored once.
class EventStore {
 public:
  // Memory only.
  EventStore() = default;
  // Replays and then appends to `log_path`.
  explicit EventStore(const std::filesystem::path& log_path, bool durable = false);

  // Returns false for a duplicate.
  bool insert(const PQEvent& e);

  // Events of `point_id` overlapping [from, to): start < to && end > from.
  std::vector<PQEvent> query(std::uint32_t point_id, EpochMs from, EpochMs to,
                             std::optional<EventType> type = std::nullopt) const;
  std::size_t size() const;
  void sync();

 private:
  using Identity = std::tuple<std::uint32_t, EventType, std::uint8_t, EpochMs, EpochMs>;
  bool insert_locked(const PQEvent& e);

  mutable std::shared_mutex mu_;
  std::map<std::pair<std::uint32_t, EpochMs>, std::vector<PQEvent>> index_;
  std::set<Identity> identities_;
  std::optional<RecordLog> log_;
};

}  // namespace gridmon::store
