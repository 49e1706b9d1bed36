#include "gridmon/device/journal.hpp"

#include <algorithm>

namespace gridmon::device {
namespace {

enum EntryKind : std::uint8_t { kFrame = 1, kTrim = 2, kHello = 3, kCounters = 4 };

constexpr std::uint64_t kCompactMinBytes = 256 * 1024;

Bytes frame_body(std::uint64_t seq, ByteView sealed) {
  Bytes b;
  ByteWriter w(b);
  w.u8(kFrame);
  w.u64(seq);
  w.bytes(sealed);
  return b;
}

Bytes u64_body(EntryKind kind, std::uint64_t v) {
  Bytes b;
  ByteWriter w(b);
  w.u8(kind);
  w.u64(v);
  return b;
}

}  // namespace

RecordLog Journal::open_log(const std::filesystem::path& path, bool durable, Journal& self) {
  try {
    return RecordLog(
        path,
        [&self](ByteView body) {
          if (body.size() < 9) throw JournalError("CORRUPT_JOURNAL: short entry");
          ByteReader r(body);
          const auto kind = r.u8();
          const auto v = r.u64();
          switch (kind) {
            case kFrame: {
              auto rest = r.bytes(r.remaining());
              if (v > self.trimmed_) {
                self.frames_[v].assign(rest.begin(), rest.end());
                self.live_bytes_ += rest.size();
              }
              self.next_seq_ = std::max(self.next_seq_, v + 1);
              break;
            }
            case kTrim:
              self.trimmed_ = std::max(self.trimmed_, v);
              self.next_seq_ = std::max(self.next_seq_, v + 1);
              while (!self.frames_.empty() && self.frames_.begin()->first <= v) {
                self.live_bytes_ -= self.frames_.begin()->second.size();
                self.frames_.erase(self.frames_.begin());
              }
              break;
            case kHello:
              self.hello_counter_ = std::max(self.hello_counter_, v);
              break;
            case kCounters:
              if (r.remaining() < 16) throw JournalError("CORRUPT_JOURNAL: short counters entry");
              self.next_seq_ = std::max(self.next_seq_, v);
              self.hello_counter_ = std::max(self.hello_counter_, r.u64());
              self.trimmed_ = std::max(self.trimmed_, r.u64());
              break;
            default:
              throw JournalError("CORRUPT_JOURNAL: unknown entry kind");
          }
        },
        durable);
  } catch (const LogCorruption& e) {
    throw JournalError(std::string("CORRUPT_JOURNAL: ") + e.what());
  }
}

Journal::Journal(std::filesystem::path path, bool durable)
    : log_(open_log(path, durable, *this)) {}

JournaledFrame Journal::append(const SealFn& seal) {
  JournaledFrame f{next_seq_, seal(next_seq_)};
  log_.append(frame_body(f.seq, f.sealed));
  log_.sync();
  ++next_seq_;
  live_bytes_ += f.sealed.size();
  frames_[f.seq] = f.sealed;
  return f;
}

void Journal::trim(std::uint64_t cum_seq) {
  if (cum_seq <= trimmed_) return;
  trimmed_ = cum_seq;
  next_seq_ = std::max(next_seq_, cum_seq + 1);
  while (!frames_.empty() && frames_.begin()->first <= cum_seq) {
    live_bytes_ -= frames_.begin()->second.size();
    frames_.erase(frames_.begin());
  }
  log_.append(u64_body(kTrim, cum_seq));
  maybe_compact();
}

std::vector<JournaledFrame> Journal::replay(std::uint64_t from_seq) const {
  std::vector<JournaledFrame> out;
  for (auto it = frames_.upper_bound(from_seq); it != frames_.end(); ++it)
    out.push_back(JournaledFrame{it->first, it->second});
  return out;
}

std::uint64_t Journal::next_hello_counter() {
  ++hello_counter_;
  log_.append(u64_body(kHello, hello_counter_));
  log_.sync();
  return hello_counter_;
}

void Journal::maybe_compact() {
  if (log_.size_bytes() < kCompactMinBytes || log_.size_bytes() < 4 * (live_bytes_ + 64)) return;
  std::vector<Bytes> bodies;
  Bytes counters;
  ByteWriter w(counters);
  w.u8(kCounters);
  w.u64(next_seq_);
  w.u64(hello_counter_);
  w.u64(trimmed_);
  bodies.push_back(std::move(counters));
  for (const auto& [seq, sealed] : frames_) bodies.push_back(frame_body(seq, sealed));
  log_.rewrite(bodies);
}

}  // namespace gridmon::device
