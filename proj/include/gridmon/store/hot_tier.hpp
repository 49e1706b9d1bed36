#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "gridmon/domain/types.hpp"

namespace gridmon::store {

/// Memory-resident records of one (point, resolution), kept sorted by ts.
class HotPartition {
 public:
  // Overwrites an existing record at the same ts.
  void insert(const BaseRecord& r);
  void range(EpochMs from, EpochMs to, std::vector<BaseRecord>& out) const;
  const BaseRecord* find(EpochMs ts) const;
  // Removes each record of `sorted` (ascending ts) whose stored copy is
  // still identical. Returns the number removed.
  std::size_t erase_if_equal(std::span<const BaseRecord> sorted);

  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  EpochMs watermark() const { return rows_.empty() ? 0 : rows_.front().ts_ms; }
  const std::vector<BaseRecord>& rows() const { return rows_; }

 private:
  std::vector<BaseRecord> rows_;
};

/// Not synchronized; TieredStore owns the locking.
class HotTier {
 public:
  using Key = std::pair<std::uint32_t, Resolution>;

  void insert(const BaseRecord& r);
  void range(std::uint32_t point_id, Resolution res, EpochMs from, EpochMs to,
             std::vector<BaseRecord>& out) const;
  const BaseRecord* find(std::uint32_t point_id, Resolution res, EpochMs ts) const;

  // Records with ts < cutoff of one resolution, sorted by (point, ts).
  std::vector<BaseRecord> older_than(Resolution res, EpochMs cutoff) const;
  // `rows` sorted by (point, ts) and of one resolution, as from older_than.
  std::size_t erase_if_equal(const std::vector<BaseRecord>& rows);

  std::size_t size() const { return size_; }

 private:
  std::map<Key, HotPartition> parts_;
  std::size_t size_ = 0;
};

}  // namespace gridmon::store
