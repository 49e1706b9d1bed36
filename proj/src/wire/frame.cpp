#include "gridmon/wire/frame.hpp"

#include <algorithm>

#include "gridmon/wire/aead.hpp"

namespace gridmon::wire {

std::string_view wire_errc_name(WireErrc e) {
  switch (e) {
    case WireErrc::kBadMagic: return "BAD_MAGIC";
    case WireErrc::kBadVersion: return "BAD_VERSION";
    case WireErrc::kBadFrameType: return "BAD_FRAME_TYPE";
    case WireErrc::kBadLength: return "BAD_LENGTH";
    case WireErrc::kUnknownDevice: return "UNKNOWN_DEVICE";
    case WireErrc::kAuthFailed: return "AUTH_FAILED";
    case WireErrc::kTruncated: return "TRUNCATED";
    case WireErrc::kBadResolutionCode: return "BAD_RESOLUTION_CODE";
    case WireErrc::kBadEventType: return "BAD_EVENT_TYPE";
    case WireErrc::kCountMismatch: return "COUNT_MISMATCH";
  }
  return "?";
}

Nonce make_nonce(std::uint32_t device_id, std::uint64_t seq) {
  Nonce n{};
  for (int i = 0; i < 4; ++i) n[i] = static_cast<std::uint8_t>(device_id >> (8 * (3 - i)));
  for (int i = 0; i < 8; ++i) n[4 + i] = static_cast<std::uint8_t>(seq >> (8 * (7 - i)));
  return n;
}

Bytes encode_header(const FrameHeader& h) {
  Bytes out;
  out.reserve(kHeaderSize);
  ByteWriter w(out);
  w.bytes(kMagic);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(h.frame_type));
  w.u32(h.device_id);
  w.u64(h.seq);
  w.u32(h.payload_len);
  return out;
}

Expected<FrameHeader, WireErrc> parse_header(ByteView bytes) {
  if (bytes.size() < kHeaderSize) return unexpected(WireErrc::kTruncated);
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) return unexpected(WireErrc::kBadMagic);
  ByteReader r(bytes.subspan(4, kHeaderSize - 4));
  if (r.u8() != kVersion) return unexpected(WireErrc::kBadVersion);
  const std::uint8_t type = r.u8();
  if (type < 1 || type > 5) return unexpected(WireErrc::kBadFrameType);
  FrameHeader h;
  h.frame_type = static_cast<FrameType>(type);
  h.device_id = r.u32();
  h.seq = r.u64();
  h.payload_len = r.u32();
  if (h.payload_len < kTagSize || h.payload_len > kMaxPayload + kTagSize)
    return unexpected(WireErrc::kBadLength);
  return h;
}

bool NonceLog::record(const Key& key, const Nonce& nonce) {
  std::lock_guard lock(mu_);
  if (seen_.emplace(key, nonce).second) return true;
  ++duplicates_;
  return false;
}

std::size_t NonceLog::size() const {
  std::lock_guard lock(mu_);
  return seen_.size();
}

std::size_t NonceLog::duplicates() const {
  std::lock_guard lock(mu_);
  return duplicates_;
}

Bytes seal_frame(FrameHeader header, ByteView plaintext, const Key& key, NonceLog* nonce_log) {
  header.payload_len = static_cast<std::uint32_t>(plaintext.size() + kTagSize);
  Bytes out = encode_header(header);
  const Nonce nonce = make_nonce(header.device_id, header.seq);
  if (nonce_log) nonce_log->record(key, nonce);
  Bytes sealed = aead_seal(key, nonce, out, plaintext);
  out.insert(out.end(), sealed.begin(), sealed.end());
  return out;
}

Expected<OpenedFrame, WireErrc> open_frame(ByteView bytes, const KeyLookup& key_lookup) {
  auto header = parse_header(bytes);
  if (!header) return unexpected(header.error());
  const std::size_t total = kHeaderSize + header->payload_len;
  if (bytes.size() < total) return unexpected(WireErrc::kTruncated);
  if (bytes.size() > total) return unexpected(WireErrc::kBadLength);

  const Key* key = key_lookup ? key_lookup(header->device_id) : nullptr;
  if (!key) return unexpected(WireErrc::kUnknownDevice);

  auto plain = aead_open(*key, make_nonce(header->device_id, header->seq),
                         bytes.first(kHeaderSize), bytes.subspan(kHeaderSize));
  if (!plain) return unexpected(WireErrc::kAuthFailed);
  return OpenedFrame{*header, std::move(*plain)};
}

}  // namespace gridmon::wire

namespace gridmon::wire {

std::optional<Expected<Bytes, WireErrc>> FrameAssembler::next() {
  const std::size_t avail = buf_.size() - consumed_;
  if (avail < kHeaderSize) {
    if (consumed_ > 0 && avail == 0) {
      buf_.clear();
      consumed_ = 0;
    }
    return std::nullopt;
  }
  ByteView view(buf_.data() + consumed_, avail);
  auto header = parse_header(view);
  if (!header) return Expected<Bytes, WireErrc>(unexpected(header.error()));
  const std::size_t total = kHeaderSize + header->payload_len;
  if (avail < total) return std::nullopt;
  Bytes frame(view.begin(), view.begin() + static_cast<std::ptrdiff_t>(total));
  consumed_ += total;
  if (consumed_ == buf_.size() || consumed_ > (1u << 16)) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(consumed_));
    consumed_ = 0;
  }
  return Expected<Bytes, WireErrc>(std::move(frame));
}

}  // namespace gridmon::wire
