#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "gridmon/common/clock.hpp"
#include "gridmon/domain/registry.hpp"
#include "gridmon/ingest/errors.hpp"
#include "gridmon/ingest/rollup.hpp"
#include "gridmon/ingest/session.hpp"
#include "gridmon/ingest/wal.hpp"
#include "gridmon/store/event_store.hpp"
#include "gridmon/store/tiered_store.hpp"
#include "gridmon/wire/frame.hpp"

namespace gridmon::ingest {

struct IngestCounters {
  std::atomic<std::uint64_t> frames{0};          // authenticated DATA/EVENT frames received
  std::atomic<std::uint64_t> duplicates{0};      // frames already accepted earlier
  std::atomic<std::uint64_t> invalid_records{0};
  std::atomic<std::uint64_t> records{0};         // records inserted from frames
  std::atomic<std::uint64_t> events{0};          // new events stored
  std::atomic<std::uint64_t> decode_failures{0};
  std::atomic<std::uint64_t> auth_failures{0};
  std::atomic<std::uint64_t> sessions{0};
  std::atomic<std::uint64_t> imported_records{0};
};

struct InboundFrame {
  wire::FrameHeader header;
  Bytes payload;
};

struct BatchResult {
  std::uint64_t cum_seq = 0;
  std::size_t accepted = 0;
  std::size_t duplicates = 0;
  std::size_t decode_failures = 0;
};

/// Transport-independent center-side ingest: dedup, WAL, store insert and
/// cumulative acks. Frames reaching this class are already authenticated.
class IngestCore {
 public:
  IngestCore(const PointRegistry& registry, store::TieredStore& store,
             store::EventStore& events, Rollup& rollup, std::filesystem::path wal_dir,
             bool durable = true);

  // Rebuilds sessions and store contents from the WAL. Call once, before
  // serving. Throws IngestError(kCorruptWal).
  void replay();

  // Cumulative ack for a device announcing itself.
  std::uint64_t hello(std::uint32_t device_id);

  // Processes frames of one device as a group commit: all new frames are
  // WAL-appended with one fsync before any is applied or acknowledged.
  // Throws IngestError(kWalIo); nothing is acknowledged in that case.
  BatchResult process_frames(std::uint32_t device_id, std::span<const InboundFrame> frames);

  // Single-frame form; throws IngestError(kDecodeFailed) for an
  // undecodable payload.
  std::uint64_t process_frame(const wire::FrameHeader& header, ByteView payload);

  // Durably inserts externally supplied records (bulk import path).
  void import_records(std::span<const BaseRecord> records);

  std::uint64_t cum_seq(std::uint32_t device_id) const;
  SessionState session(std::uint32_t device_id) const;

  const IngestCounters& counters() const { return counters_; }
  IngestCounters& counters() { return counters_; }
  const PointRegistry& registry() const { return registry_; }
  store::TieredStore& store() { return store_; }
  store::EventStore& events() { return events_; }
  Rollup& rollup() { return rollup_; }

  // Latest record timestamp applied; drives the "data" clock.
  const ManualClock& data_clock() const { return data_clock_; }

 private:
  struct Device {
    std::mutex mu;
    SessionState state;
  };
  Device& device(std::uint32_t id);

  // Decodes and applies one accepted payload. Returns false if undecodable.
  bool apply(wire::FrameType type, ByteView payload, bool count);
  void apply_record(const BaseRecord& r);

  const PointRegistry& registry_;
  store::TieredStore& store_;
  store::EventStore& events_;
  Rollup& rollup_;
  WalDirectory wal_;
  IngestCounters counters_;
  ManualClock data_clock_;

  mutable std::mutex devices_mu_;
  std::map<std::uint32_t, std::unique_ptr<Device>> devices_;
  std::mutex import_mu_;
  std::uint64_t import_seq_ = 0;
};

}  // namespace gridmon::ingest
