#include "gridmon/store/event_store.hpp"

#include "gridmon/wire/batch.hpp"

namespace gridmon::store {

EventStore::EventStore(const std::filesystem::path& log_path, bool durable) {
  log_.emplace(
      log_path,
      [this](ByteView body) {
        auto events = wire::decode_event_batch(body);
        if (!events) return;
        for (const auto& e : *events) insert_locked(e);
      },
      durable);
}

bool EventStore::insert_locked(const PQEvent& e) {
  if (!identities_.emplace(e.point_id, e.type, e.phase_mask, e.start_ms, e.end_ms).second)
    return false;
  index_[{e.point_id, e.start_ms}].push_back(e);
  return true;
}

bool EventStore::insert(const PQEvent& e) {
  std::unique_lock lock(mu_);
  if (!insert_locked(e)) return false;
  if (log_) log_->append(wire::encode_event_batch(std::span(&e, 1)));
  return true;
}

std::vector<PQEvent> EventStore::query(std::uint32_t point_id, EpochMs from, EpochMs to,
                                       std::optional<EventType> type) const {
  std::vector<PQEvent> out;
  if (from >= to) return out;
  std::shared_lock lock(mu_);
  auto it = index_.lower_bound({point_id, 0});
  auto end = index_.lower_bound({point_id, to});
  for (; it != end; ++it)
    for (const auto& e : it->second)
      if (e.end_ms > from && (!type || e.type == *type)) out.push_back(e);
  return out;
}

std::size_t EventStore::size() const {
  std::shared_lock lock(mu_);
  return identities_.size();
}

void EventStore::sync() {
  std::unique_lock lock(mu_);
  if (log_) log_->sync();
}

}  // namespace gridmon::store
