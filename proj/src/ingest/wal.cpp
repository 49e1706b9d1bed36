#include "gridmon/ingest/wal.hpp"

#include <algorithm>
#include <charconv>
#include <system_error>
#include <vector>

#include "gridmon/ingest/errors.hpp"

namespace gridmon::ingest {

Bytes encode_wal_entry(const WalEntry& e) {
  Bytes out;
  out.reserve(9 + e.payload.size());
  ByteWriter w(out);
  w.u64(e.seq);
  w.u8(static_cast<std::uint8_t>(e.frame_type));
  w.bytes(e.payload);
  return out;
}

std::optional<WalEntry> decode_wal_entry(ByteView body) {
  if (body.size() < 9) return std::nullopt;
  ByteReader r(body);
  WalEntry e;
  e.seq = r.u64();
  e.frame_type = static_cast<wire::FrameType>(r.u8());
  auto rest = r.bytes(r.remaining());
  e.payload.assign(rest.begin(), rest.end());
  return e;
}

WalDirectory::WalDirectory(std::filesystem::path dir, bool durable)
    : dir_(std::move(dir)), durable_(durable) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path WalDirectory::path_for(std::uint32_t id) const {
  if (id == kImportStream) return dir_ / "import.wal";
  return dir_ / (std::to_string(id) + ".wal");
}

void WalDirectory::replay(const ReplayVisitor& visit) {
  std::vector<std::uint32_t> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    const auto& p = entry.path();
    if (p.extension() != ".wal") continue;
    const std::string stem = p.stem().string();
    if (stem == "import") continue;
    std::uint32_t id = 0;
    auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), id);
    if (ec == std::errc{} && ptr == stem.data() + stem.size()) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::filesystem::exists(path_for(kImportStream))) ids.push_back(kImportStream);

  std::lock_guard lock(mu_);
  for (std::uint32_t id : ids) {
    auto s = std::make_unique<Stream>();
    try {
      s->log = std::make_unique<RecordLog>(
          path_for(id),
          [&](ByteView body) {
            auto e = decode_wal_entry(body);
            if (!e) throw IngestError(IngestErrc::kCorruptWal, "short WAL entry in " + path_for(id).string());
            visit(id, *e);
          },
          durable_);
    } catch (const LogCorruption& e) {
      throw IngestError(IngestErrc::kCorruptWal, e.what());
    }
    streams_[id] = std::move(s);
  }
}

WalDirectory::Stream& WalDirectory::stream(std::uint32_t id) {
  std::lock_guard lock(mu_);
  auto& slot = streams_[id];
  if (!slot) {
    slot = std::make_unique<Stream>();
    slot->log = std::make_unique<RecordLog>(path_for(id), nullptr, durable_);
  }
  return *slot;
}

void WalDirectory::append(std::uint32_t stream_id, std::span<const WalEntry> entries) {
  if (entries.empty()) return;
  Stream* s = nullptr;
  try {
    s = &stream(stream_id);
  } catch (const std::exception& e) {
    throw IngestError(IngestErrc::kWalIo, e.what());
  }
  std::lock_guard lock(s->mu);
  Bytes framed;
  for (const auto& e : entries) {
    Bytes f = RecordLog::frame_entry(encode_wal_entry(e));
    framed.insert(framed.end(), f.begin(), f.end());
  }
  try {
    s->log->append_framed(framed);
    s->log->sync();
  } catch (const std::system_error& e) {
    throw IngestError(IngestErrc::kWalIo, e.what());
  }
}

}  // namespace gridmon::ingest
