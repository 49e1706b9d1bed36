#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "gridmon/common/unique_fd.hpp"
#include "gridmon/domain/types.hpp"
#include "gridmon/store/errors.hpp"

namespace gridmon::store {

/// Immutable on-disk batch of records of one resolution.
///
/// Layout (big-endian):
///   header  "EMSG" | version u8 = 1 | resolution u8 | min_ts u64 | max_ts u64 | point_count u32
///   body    rows sorted by (point_id, ts_ms), each in the wire record layout
///   footer  point_count x (point_id u32 | byte_offset u64 | row_count u32)
///           | footer_offset u64 | crc32 u32 (over every preceding byte)
class Segment {
 public:
  static constexpr std::size_t kHeaderSize = 26;
  static constexpr std::size_t kIndexEntrySize = 16;

  // `rows` must be non-empty, share `resolution` and be sorted by
  // (point_id, ts_ms) without duplicates. The file is fsynced and renamed
  // into place. Throws StoreError(kIoError).
  static void write(const std::filesystem::path& path, Resolution resolution,
                    std::span<const BaseRecord> rows, bool durable = true);

  // Verifies magic, CRC and footer; keeps the index in memory and the file
  // open for positional reads.
  static std::shared_ptr<const Segment> open(const std::filesystem::path& path);

  // Rows of one point with from <= ts < to, ascending.
  std::vector<BaseRecord> read(std::uint32_t point_id, EpochMs from, EpochMs to) const;
  std::vector<BaseRecord> read_all() const;

  const std::filesystem::path& path() const { return path_; }
  Resolution resolution() const { return resolution_; }
  EpochMs min_ts() const { return min_ts_; }
  EpochMs max_ts() const { return max_ts_; }
  std::size_t row_count() const { return row_count_; }

 private:
  struct IndexEntry {
    std::uint32_t point_id;
    std::uint64_t byte_offset;
    std::uint32_t row_count;
  };

  Segment() = default;
  EpochMs row_ts(const IndexEntry& e, std::size_t i) const;
  std::vector<BaseRecord> read_rows(std::uint64_t offset, std::size_t count) const;

  std::filesystem::path path_;
  UniqueFd fd_;
  Resolution resolution_ = Resolution::R1S;
  EpochMs min_ts_ = 0;
  EpochMs max_ts_ = 0;
  std::size_t row_count_ = 0;
  std::vector<IndexEntry> index_;  // sorted by point_id
};

}  // namespace gridmon::store
