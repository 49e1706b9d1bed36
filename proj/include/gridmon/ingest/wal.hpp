#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>

#include "gridmon/common/record_log.hpp"
#include "gridmon/wire/frame.hpp"

namespace gridmon::ingest {

struct WalEntry {
  std::uint64_t seq = 0;
  wire::FrameType frame_type = wire::FrameType::kData;
  Bytes payload;
};

Bytes encode_wal_entry(const WalEntry& e);
std::optional<WalEntry> decode_wal_entry(ByteView body);

/// Write-ahead log of accepted frames, one file per device
/// (`<dir>/<device_id>.wal`) plus `<dir>/import.wal` for bulk imports.
/// Each entry is `seq u64 | frame_type u8 | payload`, framed and
/// CRC-protected by RecordLog.
class WalDirectory {
 public:
  static constexpr std::uint32_t kImportStream = 0xFFFFFFFFu;

  using ReplayVisitor = std::function<void(std::uint32_t stream, const WalEntry&)>;

  WalDirectory(std::filesystem::path dir, bool durable);

  // Replays every file in the directory (devices in id order, then the
  // import stream) and leaves the logs open for appending. Torn tails are
  // dropped; mid-file corruption throws IngestError(kCorruptWal).
  void replay(const ReplayVisitor& visit);

  // Appends entries for one stream and fsyncs once. Throws
  // IngestError(kWalIo).
  void append(std::uint32_t stream, std::span<const WalEntry> entries);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  struct Stream {
    std::mutex mu;
    std::unique_ptr<RecordLog> log;
  };
  Stream& stream(std::uint32_t id);
  std::filesystem::path path_for(std::uint32_t id) const;

  std::filesystem::path dir_;
  bool durable_;
  std::mutex mu_;
  std::map<std::uint32_t, std::unique_ptr<Stream>> streams_;
};

}  // namespace gridmon::ingest
