#include "gridmon/ingest/server.hpp"

#include <poll.h>
#include <sys/socket.h>

#include <vector>

#include "gridmon/common/record_log.hpp"
#include "gridmon/wire/batch.hpp"

namespace gridmon::ingest {

std::uint32_t next_boot_epoch(const std::filesystem::path& state_dir) {
  std::filesystem::create_directories(state_dir);
  const auto path = state_dir / "boot_epoch";
  std::uint32_t epoch = 0;
  if (std::filesystem::exists(path)) {
    Bytes b = read_file(path);
    if (b.size() == 4) epoch = ByteReader(b).u32();
  }
  ++epoch;
  Bytes out;
  ByteWriter(out).u32(epoch);
  write_file_atomic(path, out);
  return epoch;
}

IngestServer::IngestServer(IngestCore& core, const wire::Keyring& keys, ServerOptions options)
    : core_(core), keys_(keys), options_(std::move(options)) {}

IngestServer::~IngestServer() { stop(); }

void IngestServer::start() {
  boot_epoch_ = next_boot_epoch(options_.state_dir) & 0x3FFFFFFFu;
  listener_ = net::tcp_listen(options_.listen);
  port_ = net::local_port(listener_.get());
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void IngestServer::stop() {
  if (!running_.exchange(false)) return;
  if (acceptor_.joinable()) acceptor_.join();
  listener_.reset();
  std::list<std::thread> sessions;
  {
    std::lock_guard lock(mu_);
    sessions.swap(sessions_);
  }
  for (auto& t : sessions)
    if (t.joinable()) t.join();
}

void IngestServer::accept_loop() {
  while (running_) {
    pollfd p{listener_.get(), POLLIN, 0};
    if (::poll(&p, 1, 50) <= 0) continue;
    int fd = ::accept4(listener_.get(), nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    std::lock_guard lock(mu_);
    sessions_.emplace_back([this, fd] { serve(UniqueFd(fd)); });
  }
}

Bytes IngestServer::seal_reply(std::uint32_t device_id, wire::FrameType type, ByteView payload) {
  std::uint32_t counter;
  {
    std::lock_guard lock(mu_);
    counter = ++reply_counters_[device_id];
  }
  wire::FrameHeader h;
  h.frame_type = type;
  h.device_id = device_id;
  h.seq = wire::kServerSeqBit | (std::uint64_t{boot_epoch_} << 32) | counter;
  return wire::seal_frame(h, payload, *keys_.find(device_id), options_.nonce_log);
}

void IngestServer::serve(UniqueFd fd) {
  ++core_.counters().sessions;
  wire::FrameAssembler assembler;
  std::optional<std::uint32_t> bound_device;
  const auto lookup = keys_.lookup();

  while (running_) {
    Bytes chunk;
    auto st = net::recv_some(fd.get(), chunk, std::chrono::milliseconds(50));
    if (st == net::RecvStatus::kClosed) return;
    if (st == net::RecvStatus::kTimeout) continue;
    assembler.feed(chunk);

    std::vector<InboundFrame> batch;
    auto flush = [&]() -> bool {
      if (batch.empty()) return true;
      try {
        BatchResult r = core_.process_frames(*bound_device, batch);
        batch.clear();
        return net::send_all(fd.get(), seal_reply(*bound_device, wire::FrameType::kAck,
                                                  wire::encode_u64_payload(r.cum_seq)));
      } catch (const IngestError&) {
        return false;  // WAL failure: close without acknowledging
      }
    };

    bool close_after = false;
    while (auto raw = assembler.next()) {
      if (!*raw) {
        close_after = true;  // malformed header: the stream cannot be resynchronised
        break;
      }
      auto opened = wire::open_frame(**raw, lookup);
      if (!opened) {
        if (opened.error() == wire::WireErrc::kAuthFailed) ++core_.counters().auth_failures;
        close_after = true;
        break;
      }
      const auto& h = opened->header;
      if (bound_device && *bound_device != h.device_id) {
        close_after = true;
        break;
      }
      bound_device = h.device_id;

      if (h.frame_type == wire::FrameType::kHello) {
        if (!flush()) return;
        const std::uint64_t cum = core_.hello(h.device_id);
        if (!net::send_all(fd.get(), seal_reply(h.device_id, wire::FrameType::kAck,
                                                wire::encode_u64_payload(cum))))
          return;
      } else if (h.frame_type == wire::FrameType::kData || h.frame_type == wire::FrameType::kEvent) {
        batch.push_back(InboundFrame{h, std::move(opened->payload)});
      } else {
        close_after = true;
        break;
      }
    }
    // Frames authenticated before a failure are still committed.
    if (!flush()) return;
    if (close_after) return;
  }
}

}  // namespace gridmon::ingest
