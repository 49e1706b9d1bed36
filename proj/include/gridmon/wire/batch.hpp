#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridmon/common/bytes.hpp"
#include "gridmon/common/expected.hpp"
#include "gridmon/domain/types.hpp"
#include "gridmon/wire/frame.hpp"

namespace gridmon::wire {

// point_id u32 | ts_ms u64 | resolution u8 | flags u8 | 15 x binary64
inline constexpr std::size_t kRecordSize = 4 + 8 + 1 + 1 + kParameterCount * 8;
// point_id u32 | type u8 | phase_mask u8 | start u64 | end u64 | extreme f64
inline constexpr std::size_t kEventSize = 30;
inline constexpr std::size_t kMaxBatchRecords = 500;

void encode_record(const BaseRecord& r, ByteWriter& w);
// `in` must hold at least kRecordSize bytes.
Expected<BaseRecord, WireErrc> decode_record(ByteReader& in);

// Throws std::length_error when records.size() > kMaxBatchRecords.
Bytes encode_batch(std::span<const BaseRecord> records);
Expected<std::vector<BaseRecord>, WireErrc> decode_batch(ByteView bytes);

Bytes encode_event_batch(std::span<const PQEvent> events);
Expected<std::vector<PQEvent>, WireErrc> decode_event_batch(ByteView bytes);

// HELLO carries the device's last journaled seq; ACK a cumulative seq.
Bytes encode_u64_payload(std::uint64_t v);
Expected<std::uint64_t, WireErrc> decode_u64_payload(ByteView bytes);

}  // namespace gridmon::wire
