#include "gridmon/ingest/ingest_core.hpp"

#include <set>

#include "gridmon/domain/validate.hpp"
#include "gridmon/wire/batch.hpp"

namespace gridmon::ingest {

IngestCore::IngestCore(const PointRegistry& registry, store::TieredStore& store,
                       store::EventStore& events, Rollup& rollup, std::filesystem::path wal_dir,
                       bool durable)
    : registry_(registry),
      store_(store),
      events_(events),
      rollup_(rollup),
      wal_(std::move(wal_dir), durable) {}

IngestCore::Device& IngestCore::device(std::uint32_t id) {
  std::lock_guard lock(devices_mu_);
  auto& slot = devices_[id];
  if (!slot) {
    slot = std::make_unique<Device>();
    slot->state = SessionState(id);
  }
  return *slot;
}

void IngestCore::replay() {
  wal_.replay([this](std::uint32_t stream, const WalEntry& e) {
    if (stream == WalDirectory::kImportStream) {
      apply(e.frame_type, e.payload, false);
      import_seq_ = std::max(import_seq_, e.seq);
      return;
    }
    Device& d = device(stream);
    // Re-applying a duplicate is harmless (last writer wins), but session
    // state only advances for new seqs.
    apply(e.frame_type, e.payload, false);
    if (d.state.classify(e.seq) == SessionState::Admission::kNew) d.state.accept(e.seq);
  });
}

std::uint64_t IngestCore::hello(std::uint32_t device_id) {
  Device& d = device(device_id);
  std::lock_guard lock(d.mu);
  return d.state.cum_seq();
}

void IngestCore::apply_record(const BaseRecord& r) {
  store_.insert(r);
  if (r.resolution == Resolution::R3S) rollup_.note(r.point_id, r.ts_ms);
  const EpochMs end = r.ts_ms + duration_ms(r.resolution);
  data_clock_.advance_to(end);
}

bool IngestCore::apply(wire::FrameType type, ByteView payload, bool count) {
  if (type == wire::FrameType::kData) {
    auto records = wire::decode_batch(payload);
    if (!records) return false;
    for (const auto& r : *records) {
      if (validate_record(r, registry_)) {
        if (count) ++counters_.invalid_records;
        continue;
      }
      apply_record(r);
      if (count) ++counters_.records;
    }
    return true;
  }
  if (type == wire::FrameType::kEvent) {
    auto events = wire::decode_event_batch(payload);
    if (!events) return false;
    for (const auto& e : *events) {
      if (!registry_.contains(e.point_id)) {
        if (count) ++counters_.invalid_records;
        continue;
      }
      if (events_.insert(e) && count) ++counters_.events;
    }
    return true;
  }
  return false;
}

BatchResult IngestCore::process_frames(std::uint32_t device_id,
                                       std::span<const InboundFrame> frames) {
  Device& d = device(device_id);
  std::lock_guard lock(d.mu);
  BatchResult result;

  std::vector<WalEntry> fresh;
  std::set<std::uint64_t> in_batch;
  for (const auto& f : frames) {
    ++counters_.frames;
    const auto seq = f.header.seq;
    if (d.state.classify(seq) != SessionState::Admission::kNew || in_batch.count(seq)) {
      // kTooFar frames are dropped unacknowledged; the device retransmits.
      if (d.state.classify(seq) == SessionState::Admission::kDuplicate || in_batch.count(seq)) {
        ++counters_.duplicates;
        ++result.duplicates;
      }
      continue;
    }
    const bool decodable =
        (f.header.frame_type == wire::FrameType::kData && wire::decode_batch(f.payload)) ||
        (f.header.frame_type == wire::FrameType::kEvent && wire::decode_event_batch(f.payload));
    if (!decodable) {
      ++counters_.decode_failures;
      ++result.decode_failures;
      continue;
    }
    in_batch.insert(seq);
    fresh.push_back(WalEntry{seq, f.header.frame_type, f.payload});
  }

  wal_.append(device_id, fresh);  // durability point for the ack

  for (const auto& e : fresh) {
    apply(e.frame_type, e.payload, true);
    d.state.accept(e.seq);
    ++result.accepted;
  }
  result.cum_seq = d.state.cum_seq();
  return result;
}

std::uint64_t IngestCore::process_frame(const wire::FrameHeader& header, ByteView payload) {
  InboundFrame f{header, Bytes(payload.begin(), payload.end())};
  BatchResult r = process_frames(header.device_id, std::span(&f, 1));
  if (r.decode_failures > 0)
    throw IngestError(IngestErrc::kDecodeFailed, "frame seq " + std::to_string(header.seq));
  return r.cum_seq;
}

void IngestCore::import_records(std::span<const BaseRecord> records) {
  std::lock_guard lock(import_mu_);
  std::vector<WalEntry> entries;
  for (std::size_t i = 0; i < records.size(); i += wire::kMaxBatchRecords) {
    auto chunk = records.subspan(i, std::min(wire::kMaxBatchRecords, records.size() - i));
    entries.push_back(WalEntry{++import_seq_, wire::FrameType::kData, wire::encode_batch(chunk)});
  }
  wal_.append(WalDirectory::kImportStream, entries);
  for (const auto& r : records) {
    apply_record(r);
    ++counters_.imported_records;
  }
}

std::uint64_t IngestCore::cum_seq(std::uint32_t device_id) const {
  return session(device_id).cum_seq();
}

SessionState IngestCore::session(std::uint32_t device_id) const {
  Device* d = nullptr;
  {
    std::lock_guard lock(devices_mu_);
    auto it = devices_.find(device_id);
    if (it == devices_.end()) return SessionState(device_id);
    d = it->second.get();
  }
  std::lock_guard lock(d->mu);
  return d->state;
}

}  // namespace gridmon::ingest
