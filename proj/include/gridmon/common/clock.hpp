#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace gridmon {

using EpochMs = std::uint64_t;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual EpochMs now_ms() const = 0;
};

class SystemClock final : public Clock {
 public:
  EpochMs now_ms() const override {
    return static_cast<EpochMs>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::system_clock::now().time_since_epoch())
                                    .count());
  }
};

// Virtual clock for simulation and tests. advance_to never moves backwards,
// which also makes it usable as a "latest data seen" clock.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(EpochMs start = 0) : now_(start) {}

  EpochMs now_ms() const override { return now_.load(std::memory_order_acquire); }
  void set(EpochMs t) { now_.store(t, std::memory_order_release); }
  void advance(EpochMs delta) { now_.fetch_add(delta, std::memory_order_acq_rel); }
  void advance_to(EpochMs t) {
    EpochMs cur = now_.load(std::memory_order_acquire);
    while (cur < t && !now_.compare_exchange_weak(cur, t, std::memory_order_acq_rel)) {
    }
  }

 private:
  std::atomic<EpochMs> now_;
};

}  // namespace gridmon
