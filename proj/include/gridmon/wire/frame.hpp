#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string_view>
#include <utility>

#include "gridmon/common/bytes.hpp"
#include "gridmon/common/expected.hpp"

namespace gridmon::wire {

inline constexpr std::array<std::uint8_t, 4> kMagic = {0x45, 0x4D, 0x4F, 0x4E};  // "EMON"
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 22;
inline constexpr std::size_t kTagSize = 16;
inline constexpr std::size_t kNonceSize = 12;
// Upper bound accepted from a peer before allocating a payload buffer.
inline constexpr std::uint32_t kMaxPayload = 1u << 20;

// Sequence-number spaces sharing one per-device key. Data/event frames use
// journal seqs below kHelloSeqBit.
inline constexpr std::uint64_t kHelloSeqBit = 1ull << 62;
inline constexpr std::uint64_t kServerSeqBit = 1ull << 63;

enum class FrameType : std::uint8_t { kHello = 1, kData = 2, kEvent = 3, kAck = 4, kErr = 5 };

using Key = std::array<std::uint8_t, 16>;
using Nonce = std::array<std::uint8_t, kNonceSize>;

struct FrameHeader {
  FrameType frame_type = FrameType::kData;
  std::uint32_t device_id = 0;
  std::uint64_t seq = 0;
  std::uint32_t payload_len = 0;  // ciphertext + tag; filled in by seal_frame

  bool operator==(const FrameHeader&) const = default;
};

enum class WireErrc {
  kBadMagic,
  kBadVersion,
  kBadFrameType,
  kBadLength,
  kUnknownDevice,
  kAuthFailed,
  kTruncated,
  kBadResolutionCode,
  kBadEventType,
  kCountMismatch,
};

std::string_view wire_errc_name(WireErrc e);

Nonce make_nonce(std::uint32_t device_id, std::uint64_t seq);

Bytes encode_header(const FrameHeader& h);

// Parses the clear 22-byte header. Does not authenticate.
Expected<FrameHeader, WireErrc> parse_header(ByteView bytes);

/// Records every (key, nonce) pair handed to the cipher so tests can assert
/// that none repeats. Thread-safe.
class NonceLog {
 public:
  // Returns false if the pair was already present.
  bool record(const Key& key, const Nonce& nonce);
  std::size_t size() const;
  std::size_t duplicates() const;

 private:
  mutable std::mutex mu_;
  std::set<std::pair<Key, Nonce>> seen_;
  std::size_t duplicates_ = 0;
};

// Header (payload_len overwritten) followed by AEAD ciphertext and tag. The
// nonce is device_id || seq; the associated data is the 22 header bytes.
Bytes seal_frame(FrameHeader header, ByteView plaintext, const Key& key, NonceLog* nonce_log = nullptr);

struct OpenedFrame {
  FrameHeader header;
  Bytes payload;
};

using KeyLookup = std::function<const Key*(std::uint32_t device_id)>;

// Parses and authenticates one complete frame. `bytes` must hold exactly
// one frame.
Expected<OpenedFrame, WireErrc> open_frame(ByteView bytes, const KeyLookup& key_lookup);

}  // namespace gridmon::wire

namespace gridmon::wire {

/// Reassembles frames from a byte stream. Header validity is checked as soon
/// as 22 bytes are buffered so a peer cannot make us wait on a bogus length.
class FrameAssembler {
 public:
  void feed(ByteView data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
  Bytes& buffer() { return buf_; }

  // Next complete raw frame, an error for a malformed header, or nullopt
  // when more bytes are needed.
  std::optional<Expected<Bytes, WireErrc>> next();

 private:
  Bytes buf_;
  std::size_t consumed_ = 0;
};

}  // namespace gridmon::wire
