#include "gridmon/ingest/session.hpp"

#include <cassert>

namespace gridmon::ingest {

SessionState::Admission SessionState::classify(std::uint64_t seq) const {
  if (seq == 0 || seq <= cum_seq_ || pending_.count(seq)) return Admission::kDuplicate;
  if (seq - cum_seq_ > kMaxPending) return Admission::kTooFar;
  return Admission::kNew;
}

void SessionState::accept(std::uint64_t seq) {
  assert(classify(seq) == Admission::kNew);
  if (seq != cum_seq_ + 1) {
    pending_.insert(seq);
    return;
  }
  cum_seq_ = seq;
  auto it = pending_.begin();
  while (it != pending_.end() && *it == cum_seq_ + 1) {
    cum_seq_ = *it;
    it = pending_.erase(it);
  }
}

}  // namespace gridmon::ingest
