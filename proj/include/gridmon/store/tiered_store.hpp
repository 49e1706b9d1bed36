#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string_view>
#include <vector>

#include "gridmon/domain/registry.hpp"
#include "gridmon/store/hot_tier.hpp"
#include "gridmon/store/segment.hpp"

namespace gridmon::store {

struct StoreOptions {
  std::filesystem::path data_dir;  // segments live in <data_dir>/segments/<res>/
  bool durable = true;
  // When set, query_range rejects points not in the registry.
  const PointRegistry* registry = nullptr;
  // Test hook invoked at named points of demotion ("after_segment_write");
  // throwing from it simulates a crash at that point.
  std::function<void(std::string_view stage)> fault_hook;
};

/// Two-tier record store: a memory-resident hot tier and immutable disk
/// segments behind one query interface. Range queries merge both tiers;
/// newer segments shadow older ones and the hot tier shadows all segments.
///
/// Thread-safe. Readers share a lock; inserts and the demotion swap are
/// exclusive, so no query observes a record missing from both tiers.
class TieredStore {
 public:
  explicit TieredStore(StoreOptions options);

  void insert(const BaseRecord& r);
  void insert_many(std::span<const BaseRecord> rs);

  // Half-open [from, to), ascending ts. Throws StoreError(kUnknownPoint).
  std::vector<BaseRecord> query_range(std::uint32_t point_id, Resolution res, EpochMs from,
                                      EpochMs to) const;
  std::optional<BaseRecord> get(std::uint32_t point_id, Resolution res, EpochMs ts) const;

  // Moves hot records with ts < cutoff into one new segment per resolution.
  // Returns the files written.
  std::vector<std::filesystem::path> demote(EpochMs cutoff);

  // Deletes whole segments whose max_ts < now - keep_days.
  std::vector<std::filesystem::path> retention_purge(int keep_days, EpochMs now);

  std::size_t hot_record_count() const;
  std::size_t segment_count() const;
  std::vector<std::filesystem::path> segment_paths() const;

 private:
  std::filesystem::path segment_dir(Resolution r) const;
  void load_catalog();

  StoreOptions options_;
  mutable std::shared_mutex mu_;
  std::mutex maintenance_mu_;
  HotTier hot_;
  // Per resolution, ordered by demotion run (older first).
  std::map<Resolution, std::vector<std::shared_ptr<const Segment>>> catalog_;
  std::uint64_t next_run_ = 0;
};

}  // namespace gridmon::store
