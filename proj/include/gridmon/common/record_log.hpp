#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridmon/common/bytes.hpp"
#include "gridmon/common/unique_fd.hpp"

namespace gridmon {

// A CRC failure that is followed by further data. Torn tails are not
// corruption; they are dropped on open.
class LogCorruption : public std::runtime_error {
 public:
  LogCorruption(const std::filesystem::path& path, std::uint64_t offset);

  const std::filesystem::path& path() const { return path_; }
  std::uint64_t offset() const { return offset_; }

 private:
  std::filesystem::path path_;
  std::uint64_t offset_;
};

// Append-only file of length-prefixed, CRC-protected entries:
//   u32 body_len | body | u32 crc32(body_len bytes ++ body)
// Shared by the device journal, the ingest WAL and the event log.
class RecordLog {
 public:
  using Visitor = std::function<void(ByteView body)>;

  static constexpr std::uint32_t kMaxBody = 64u << 20;

  // Opens or creates `path`, feeding each intact entry to `visit` in file
  // order. A torn final entry is truncated away.
  RecordLog(std::filesystem::path path, const Visitor& visit, bool durable = true);

  RecordLog(RecordLog&&) noexcept = default;
  RecordLog& operator=(RecordLog&&) noexcept = default;

  static Bytes frame_entry(ByteView body);

  void append(ByteView body);
  // Appends already-framed entries (see frame_entry) with a single write.
  void append_framed(ByteView framed);
  void sync();

  // Atomically replaces the file contents with `bodies` (tmp + rename).
  void rewrite(const std::vector<Bytes>& bodies);

  const std::filesystem::path& path() const { return path_; }
  std::uint64_t size_bytes() const { return size_; }
  bool dropped_torn_tail() const { return dropped_tail_; }

 private:
  std::filesystem::path path_;
  UniqueFd fd_;
  std::uint64_t size_ = 0;
  bool durable_ = true;
  bool dropped_tail_ = false;
};

// Reads a whole file; throws std::system_error on failure.
Bytes read_file(const std::filesystem::path& path);

// Writes `data` to `path` via a temporary file, fsyncs it and renames it in
// place, then fsyncs the parent directory.
void write_file_atomic(const std::filesystem::path& path, ByteView data, bool durable = true);

void fsync_directory(const std::filesystem::path& dir);

}  // namespace gridmon
