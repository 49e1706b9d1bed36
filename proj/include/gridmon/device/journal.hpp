#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "gridmon/common/record_log.hpp"

namespace gridmon::device {

class JournalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;  // CORRUPT_JOURNAL
};

struct JournaledFrame {
  std::uint64_t seq = 0;
  Bytes sealed;
};

/// Device-side store-and-forward log of sealed frames awaiting
/// acknowledgment. Sequence numbers are assigned here, are contiguous, and
/// are never reused: the counter survives restarts and trims.
///
/// On disk this is a RecordLog of entries tagged FRAME(seq, bytes),
/// TRIM(cum_seq), HELLO(counter) and COUNTERS(next_seq, hello_counter, trimmed); the
/// file is compacted once dead entries dominate.
class Journal {
 public:
  using SealFn = std::function<Bytes(std::uint64_t seq)>;

  // Throws JournalError when a mid-file entry fails its CRC. A torn tail is
  // dropped silently.
  Journal(std::filesystem::path path, bool durable = true);

  // Assigns next_seq, seals with it, persists, and returns the frame.
  JournaledFrame append(const SealFn& seal);

  // Drops every frame with seq <= cum_seq. A cum_seq beyond the highest
  // appended seq (the center knows more than this journal) also moves
  // next_seq past it.
  void trim(std::uint64_t cum_seq);

  // Frames with seq > from_seq, ascending.
  std::vector<JournaledFrame> replay(std::uint64_t from_seq) const;

  // Persisted counter for HELLO nonces.
  std::uint64_t next_hello_counter();

  std::uint64_t next_seq() const { return next_seq_; }
  std::uint64_t last_seq() const { return next_seq_ - 1; }
  std::uint64_t trimmed_through() const { return trimmed_; }
  std::size_t pending() const { return frames_.size(); }
  bool dropped_torn_tail() const { return log_.dropped_torn_tail(); }

 private:
  void maybe_compact();
  static RecordLog open_log(const std::filesystem::path& path, bool durable, Journal& self);

  std::map<std::uint64_t, Bytes> frames_;
  std::uint64_t next_seq_ = 1;
  std::uint64_t trimmed_ = 0;
  std::uint64_t hello_counter_ = 0;
  std::uint64_t live_bytes_ = 0;
  RecordLog log_;
};

}  // namespace gridmon::device
