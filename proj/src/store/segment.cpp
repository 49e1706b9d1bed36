#include "gridmon/store/segment.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <system_error>

#include "gridmon/common/crc32.hpp"
#include "gridmon/common/record_log.hpp"
#include "gridmon/wire/batch.hpp"

namespace gridmon::store {
namespace {

constexpr std::uint8_t kSegmentMagic[4] = {'E', 'M', 'S', 'G'};
constexpr std::uint8_t kSegmentVersion = 1;
constexpr std::size_t kRow = wire::kRecordSize;

}  // namespace

std::string_view store_errc_name(StoreErrc e) {
  switch (e) {
    case StoreErrc::kCrcMismatch: return "CRC_MISMATCH";
    case StoreErrc::kBadMagic: return "BAD_MAGIC";
    case StoreErrc::kBadFooter: return "BAD_FOOTER";
    case StoreErrc::kUnknownPoint: return "UNKNOWN_POINT";
    case StoreErrc::kIoError: return "IO_ERROR";
  }
  return "?";
}

void Segment::write(const std::filesystem::path& path, Resolution resolution,
                    std::span<const BaseRecord> rows, bool durable) {
  if (rows.empty()) throw std::invalid_argument("segment needs at least one row");

  EpochMs min_ts = rows.front().ts_ms, max_ts = rows.front().ts_ms;
  std::vector<IndexEntry> index;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.resolution != resolution) throw std::invalid_argument("segment rows mix resolutions");
    if (i > 0) {
      const auto& prev = rows[i - 1];
      if (std::pair(prev.point_id, prev.ts_ms) >= std::pair(r.point_id, r.ts_ms))
        throw std::invalid_argument("segment rows not strictly sorted by (point, ts)");
    }
    min_ts = std::min(min_ts, r.ts_ms);
    max_ts = std::max(max_ts, r.ts_ms);
    if (index.empty() || index.back().point_id != r.point_id)
      index.push_back({r.point_id, kHeaderSize + i * kRow, 0});
    ++index.back().row_count;
  }

  Bytes buf;
  buf.reserve(kHeaderSize + rows.size() * kRow + index.size() * kIndexEntrySize + 12);
  ByteWriter w(buf);
  w.bytes(kSegmentMagic);
  w.u8(kSegmentVersion);
  w.u8(resolution_code(resolution));
  w.u64(min_ts);
  w.u64(max_ts);
  w.u32(static_cast<std::uint32_t>(index.size()));
  for (const auto& r : rows) wire::encode_record(r, w);
  const std::uint64_t footer_offset = buf.size();
  for (const auto& e : index) {
    w.u32(e.point_id);
    w.u64(e.byte_offset);
    w.u32(e.row_count);
  }
  w.u64(footer_offset);
  w.u32(crc32(buf));

  try {
    write_file_atomic(path, buf, durable);
  } catch (const std::system_error& e) {
    std::error_code ec;
    auto tmp = path;
    tmp += ".tmp";
    std::filesystem::remove(tmp, ec);
    throw StoreError(StoreErrc::kIoError, e.what());
  }
}

std::shared_ptr<const Segment> Segment::open(const std::filesystem::path& path) {
  Bytes data;
  try {
    data = read_file(path);
  } catch (const std::system_error& e) {
    throw StoreError(StoreErrc::kIoError, e.what());
  }
  const std::string where = path.string();
  if (data.size() < kHeaderSize + 12) throw StoreError(StoreErrc::kBadFooter, where + " too short");
  if (!std::equal(std::begin(kSegmentMagic), std::end(kSegmentMagic), data.begin()) ||
      data[4] != kSegmentVersion)
    throw StoreError(StoreErrc::kBadMagic, where);

  ByteReader crc_in(ByteView(data).last(4));
  if (crc32(ByteView(data).first(data.size() - 4)) != crc_in.u32())
    throw StoreError(StoreErrc::kCrcMismatch, where);

  std::shared_ptr<Segment> seg(new Segment());
  seg->path_ = path;
  ByteReader hdr(ByteView(data).subspan(5, kHeaderSize - 5));
  auto res = resolution_from_code(hdr.u8());
  if (!res) throw StoreError(StoreErrc::kBadMagic, where + " resolution code");
  seg->resolution_ = *res;
  seg->min_ts_ = hdr.u64();
  seg->max_ts_ = hdr.u64();
  const std::uint32_t point_count = hdr.u32();

  ByteReader tail(ByteView(data).last(12));
  const std::uint64_t footer_offset = tail.u64();
  const std::uint64_t footer_end = data.size() - 12;
  if (footer_offset < kHeaderSize || footer_offset > footer_end ||
      footer_end - footer_offset != std::uint64_t{point_count} * kIndexEntrySize ||
      (footer_offset - kHeaderSize) % kRow != 0)
    throw StoreError(StoreErrc::kBadFooter, where);

  ByteReader idx(ByteView(data).subspan(footer_offset, footer_end - footer_offset));
  std::uint64_t expect_offset = kHeaderSize;
  for (std::uint32_t i = 0; i < point_count; ++i) {
    IndexEntry e{idx.u32(), idx.u64(), idx.u32()};
    if (e.byte_offset != expect_offset || e.row_count == 0 ||
        (!seg->index_.empty() && seg->index_.back().point_id >= e.point_id))
      throw StoreError(StoreErrc::kBadFooter, where + " index");
    expect_offset += std::uint64_t{e.row_count} * kRow;
    seg->row_count_ += e.row_count;
    seg->index_.push_back(e);
  }
  if (expect_offset != footer_offset) throw StoreError(StoreErrc::kBadFooter, where + " row count");

  seg->fd_.reset(::open(path.c_str(), O_RDONLY | O_CLOEXEC));
  if (!seg->fd_.valid())
    throw StoreError(StoreErrc::kIoError, std::system_category().message(errno) + " " + where);
  return seg;
}

std::vector<BaseRecord> Segment::read_rows(std::uint64_t offset, std::size_t count) const {
  Bytes buf(count * kRow);
  std::size_t got = 0;
  while (got < buf.size()) {
    ssize_t r = ::pread(fd_.get(), buf.data() + got, buf.size() - got,
                        static_cast<off_t>(offset + got));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) throw StoreError(StoreErrc::kIoError, "short read " + path_.string());
    got += static_cast<std::size_t>(r);
  }
  std::vector<BaseRecord> out;
  out.reserve(count);
  ByteReader in(buf);
  for (std::size_t i = 0; i < count; ++i) {
    auto rec = wire::decode_record(in);
    if (!rec) throw StoreError(StoreErrc::kBadFooter, "bad row in " + path_.string());
    out.push_back(*rec);
  }
  return out;
}

EpochMs Segment::row_ts(const IndexEntry& e, std::size_t i) const {
  std::uint8_t b[8];
  const auto off = static_cast<off_t>(e.byte_offset + i * kRow + 4);
  if (::pread(fd_.get(), b, 8, off) != 8)
    throw StoreError(StoreErrc::kIoError, "short read " + path_.string());
  return load_be64(b);
}

std::vector<BaseRecord> Segment::read(std::uint32_t point_id, EpochMs from, EpochMs to) const {
  if (from >= to || to <= min_ts_ || from > max_ts_) return {};
  auto it = std::lower_bound(index_.begin(), index_.end(), point_id,
                             [](const IndexEntry& e, std::uint32_t id) { return e.point_id < id; });
  if (it == index_.end() || it->point_id != point_id) return {};

  // Binary search on the on-disk ts column.
  auto first_not_before = [&](EpochMs t) {
    std::size_t lo = 0, hi = it->row_count;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (row_ts(*it, mid) < t)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  };
  const std::size_t begin = first_not_before(from);
  const std::size_t end = first_not_before(to);
  if (begin >= end) return {};
  return read_rows(it->byte_offset + begin * kRow, end - begin);
}

std::vector<BaseRecord> Segment::read_all() const { return read_rows(kHeaderSize, row_count_); }

}  // namespace gridmon::store
