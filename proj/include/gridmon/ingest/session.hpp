#pragma once

#include <cstdint>
#include <set>

namespace gridmon::ingest {

/// Per-device acceptance state behind the cumulative ack.
class SessionState {
 public:
  static constexpr std::size_t kMaxPending = 10000;

  enum class Admission { kNew, kDuplicate, kTooFar };

  SessionState() = default;
  explicit SessionState(std::uint32_t device_id) : device_id_(device_id) {}

  Admission classify(std::uint64_t seq) const;
  // Records `seq` as durably accepted and advances cum_seq over any
  // contiguous run. Precondition: classify(seq) == kNew.
  void accept(std::uint64_t seq);

  std::uint32_t device_id() const { return device_id_; }
  std::uint64_t cum_seq() const { return cum_seq_; }
  const std::set<std::uint64_t>& pending() const { return pending_; }

 private:
  std::uint32_t device_id_ = 0;
  std::uint64_t cum_seq_ = 0;
  std::set<std::uint64_t> pending_;  // accepted seqs > cum_seq + 1
};

}  // namespace gridmon::ingest
