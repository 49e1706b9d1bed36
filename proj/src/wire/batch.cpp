#include "gridmon/wire/batch.hpp"

#include <stdexcept>

namespace gridmon::wire {

void encode_record(const BaseRecord& r, ByteWriter& w) {
  w.u32(r.point_id);
  w.u64(r.ts_ms);
  w.u8(resolution_code(r.resolution));
  w.u8(r.flags);
  for (std::size_t i = 0; i < kParameterCount; ++i)
    w.f64(parameter_value(r, static_cast<Parameter>(i)));
}

Expected<BaseRecord, WireErrc> decode_record(ByteReader& in) {
  BaseRecord r;
  r.point_id = in.u32();
  r.ts_ms = in.u64();
  auto res = resolution_from_code(in.u8());
  r.flags = in.u8();
  for (std::size_t i = 0; i < kParameterCount; ++i)
    set_parameter(r, static_cast<Parameter>(i), in.f64());
  if (!res) return unexpected(WireErrc::kBadResolutionCode);
  r.resolution = *res;
  return r;
}

Bytes encode_batch(std::span<const BaseRecord> records) {
  if (records.size() > kMaxBatchRecords) throw std::length_error("batch exceeds 500 records");
  Bytes out;
  out.reserve(2 + records.size() * kRecordSize);
  ByteWriter w(out);
  w.u16(static_cast<std::uint16_t>(records.size()));
  for (const auto& r : records) encode_record(r, w);
  return out;
}

Expected<std::vector<BaseRecord>, WireErrc> decode_batch(ByteView bytes) {
  if (bytes.size() < 2) return unexpected(WireErrc::kTruncated);
  ByteReader in(bytes);
  const std::size_t count = in.u16();
  const std::size_t body = bytes.size() - 2;
  if (body < count * kRecordSize) return unexpected(WireErrc::kTruncated);
  if (body != count * kRecordSize || count > kMaxBatchRecords)
    return unexpected(WireErrc::kCountMismatch);
  std::vector<BaseRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto r = decode_record(in);
    if (!r) return unexpected(r.error());
    out.push_back(*r);
  }
  return out;
}

Bytes encode_event_batch(std::span<const PQEvent> events) {
  if (events.size() > 0xFFFF) throw std::length_error("too many events in one batch");
  Bytes out;
  out.reserve(2 + events.size() * kEventSize);
  ByteWriter w(out);
  w.u16(static_cast<std::uint16_t>(events.size()));
  for (const auto& e : events) {
    w.u32(e.point_id);
    w.u8(static_cast<std::uint8_t>(e.type));
    w.u8(e.phase_mask);
    w.u64(e.start_ms);
    w.u64(e.end_ms);
    w.f64(e.extreme_pu);
  }
  return out;
}

Expected<std::vector<PQEvent>, WireErrc> decode_event_batch(ByteView bytes) {
  if (bytes.size() < 2) return unexpected(WireErrc::kTruncated);
  ByteReader in(bytes);
  const std::size_t count = in.u16();
  const std::size_t body = bytes.size() - 2;
  if (body < count * kEventSize) return unexpected(WireErrc::kTruncated);
  if (body != count * kEventSize) return unexpected(WireErrc::kCountMismatch);
  std::vector<PQEvent> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    PQEvent e;
    e.point_id = in.u32();
    auto type = event_type_from_code(in.u8());
    e.phase_mask = in.u8();
    e.start_ms = in.u64();
    e.end_ms = in.u64();
    e.extreme_pu = in.f64();
    if (!type) return unexpected(WireErrc::kBadEventType);
    e.type = *type;
    out.push_back(e);
  }
  return out;
}

Bytes encode_u64_payload(std::uint64_t v) {
  Bytes out;
  ByteWriter(out).u64(v);
  return out;
}

Expected<std::uint64_t, WireErrc> decode_u64_payload(ByteView bytes) {
  if (bytes.size() < 8) return unexpected(WireErrc::kTruncated);
  if (bytes.size() > 8) return unexpected(WireErrc::kBadLength);
  return ByteReader(bytes).u64();
}

}  // namespace gridmon::wire
