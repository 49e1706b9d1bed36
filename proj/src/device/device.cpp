#include "gridmon/device/device.hpp"

#include <thread>

#include "gridmon/device/synth.hpp"
#include "gridmon/pq/aggregate.hpp"
#include "gridmon/wire/batch.hpp"

namespace gridmon::device {

Device::Device(const Scenario& scenario, DeviceConfig config)
    : scenario_(scenario),
      config_(std::move(config)),
      journal_(config_.journal_dir / (std::to_string(config_.device_id) + ".log"),
               config_.durable_journal) {
  config_.detector.validate();
  detector_.point_id = config_.point_id;
}

std::uint64_t Device::emit(wire::FrameType type, const Bytes& payload) {
  auto f = journal_.append([&](std::uint64_t seq) {
    wire::FrameHeader h;
    h.frame_type = type;
    h.device_id = config_.device_id;
    h.seq = seq;
    return wire::seal_frame(h, payload, config_.key, config_.nonce_log);
  });
  return f.seq;
}

std::vector<OutboundFrame> Device::step(std::uint64_t t_s) {
  const SynthSample s = synthesize_base_record(scenario_, config_.point_id, t_s);
  for (auto& e : pq::detect_events_step(detector_, config_.detector, s.record.ts_ms, s.vrms_pu))
    closed_.push_back(e);
  window_.push_back(s.record);

  std::vector<OutboundFrame> out;
  const EpochMs ts = s.record.ts_ms;
  const bool window_closes = window_align(ts + 1000, Resolution::R3S) != window_align(ts, Resolution::R3S);
  if (!window_closes) return out;

  const BaseRecord agg = pq::aggregate_window(window_, Resolution::R3S);
  window_.clear();
  out.push_back({emit(wire::FrameType::kData, wire::encode_batch(std::span(&agg, 1))),
                 wire::FrameType::kData});
  ++data_frames_;
  if (config_.keep_outputs) emitted_records_.push_back(agg);

  if (!closed_.empty()) {
    out.push_back({emit(wire::FrameType::kEvent, wire::encode_event_batch(closed_)),
                   wire::FrameType::kEvent});
    ++event_frames_;
    if (config_.keep_outputs)
      emitted_events_.insert(emitted_events_.end(), closed_.begin(), closed_.end());
    closed_.clear();
  }
  return out;
}

Bytes Device::make_hello() {
  wire::FrameHeader h;
  h.frame_type = wire::FrameType::kHello;
  h.device_id = config_.device_id;
  h.seq = wire::kHelloSeqBit | journal_.next_hello_counter();
  return wire::seal_frame(h, wire::encode_u64_payload(journal_.last_seq()), config_.key,
                          config_.nonce_log);
}

DeviceLink::DeviceLink(Device& device, net::Endpoint endpoint, std::chrono::milliseconds io_timeout)
    : device_(device), endpoint_(std::move(endpoint)), io_timeout_(io_timeout) {}

void DeviceLink::disconnect() {
  fd_.reset();
  inbound_ = wire::FrameAssembler{};
}

bool DeviceLink::read_acks(std::chrono::milliseconds wait) {
  Bytes chunk;
  auto st = net::recv_some(fd_.get(), chunk, wait);
  if (st == net::RecvStatus::kClosed) return false;
  if (st == net::RecvStatus::kTimeout) return true;
  inbound_.feed(chunk);

  const auto& cfg = device_.config();
  auto lookup = [&](std::uint32_t id) -> const wire::Key* {
    return id == cfg.device_id ? &cfg.key : nullptr;
  };
  while (auto raw = inbound_.next()) {
    if (!*raw) return false;
    auto opened = wire::open_frame(**raw, lookup);
    if (!opened || !(opened->header.seq & wire::kServerSeqBit)) return false;
    if (opened->header.frame_type != wire::FrameType::kAck) return false;
    auto cum = wire::decode_u64_payload(opened->payload);
    if (!cum) return false;
    ++stats_.acks;
    if (*cum > acked_) acked_ = *cum;
    device_.journal().trim(*cum);
    if (sent_through_ < *cum) sent_through_ = *cum;
  }
  return true;
}

bool DeviceLink::connect() {
  disconnect();
  try {
    fd_ = net::tcp_connect(endpoint_, io_timeout_);
  } catch (const std::exception&) {
    fd_.reset();
    return false;
  }
  ++stats_.connects;
  if (!net::send_all(fd_.get(), device_.make_hello())) {
    disconnect();
    return false;
  }
  // The first reply is the center's cumulative ack for this device.
  const std::uint64_t acks_before = stats_.acks;
  const auto deadline = std::chrono::steady_clock::now() + io_timeout_;
  while (stats_.acks == acks_before) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0 || !read_acks(left)) {
      disconnect();
      return false;
    }
  }
  // Resume right after what the center holds.
  sent_through_ = acked_;
  return true;
}

void DeviceLink::pump() {
  if (!connected()) return;
  for (const auto& f : device_.journal().replay(sent_through_)) {
    if (!net::send_all(fd_.get(), f.sealed)) {
      disconnect();
      return;
    }
    ++stats_.frames_sent;
    if (f.seq <= highest_ever_sent_) ++stats_.retransmissions;
    highest_ever_sent_ = std::max(highest_ever_sent_, f.seq);
    sent_through_ = f.seq;
  }
  if (!read_acks(std::chrono::milliseconds(0))) disconnect();
}

bool DeviceLink::drain(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (device_.journal().pending() > 0) {
    if (std::chrono::steady_clock::now() >= deadline) return false;
    if (!connected() && !connect()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      continue;
    }
    pump();
    if (connected() && device_.journal().pending() > 0 &&
        !read_acks(std::chrono::milliseconds(20)))
      disconnect();
  }
  return true;
}

}  // namespace gridmon::device
