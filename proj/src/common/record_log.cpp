#include "gridmon/common/record_log.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <system_error>

#include "gridmon/common/crc32.hpp"

namespace gridmon {
namespace {

[[noreturn]] void throw_errno(const std::string& what, const std::filesystem::path& p) {
  throw std::system_error(errno, std::generic_category(), what + " " + p.string());
}

void write_all(int fd, const std::uint8_t* data, std::size_t n, const std::filesystem::path& p) {
  while (n > 0) {
    ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw_errno("write", p);
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

}  // namespace

LogCorruption::LogCorruption(const std::filesystem::path& path, std::uint64_t offset)
    : std::runtime_error("corrupt log " + path.string() + " at offset " + std::to_string(offset)),
      path_(path),
      offset_(offset) {}

Bytes read_file(const std::filesystem::path& path) {
  UniqueFd fd(::open(path.c_str(), O_RDONLY | O_CLOEXEC));
  if (!fd.valid()) throw_errno("open", path);
  struct stat st {};
  if (::fstat(fd.get(), &st) != 0) throw_errno("fstat", path);
  Bytes out(static_cast<std::size_t>(st.st_size));
  std::size_t got = 0;
  while (got < out.size()) {
    ssize_t r = ::read(fd.get(), out.data() + got, out.size() - got);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw_errno("read", path);
    }
    if (r == 0) break;
    got += static_cast<std::size_t>(r);
  }
  out.resize(got);
  return out;
}

void fsync_directory(const std::filesystem::path& dir) {
  UniqueFd fd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC));
  if (!fd.valid()) throw_errno("open dir", dir);
  if (::fsync(fd.get()) != 0) throw_errno("fsync dir", dir);
}

void write_file_atomic(const std::filesystem::path& path, ByteView data, bool durable) {
  auto tmp = path;
  tmp += ".tmp";
  {
    UniqueFd fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
    if (!fd.valid()) throw_errno("open", tmp);
    write_all(fd.get(), data.data(), data.size(), tmp);
    if (durable && ::fdatasync(fd.get()) != 0) throw_errno("fdatasync", tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::system_error(ec, "rename " + tmp.string());
  if (durable) fsync_directory(path.has_parent_path() ? path.parent_path() : ".");
}

Bytes RecordLog::frame_entry(ByteView body) {
  Bytes out;
  out.reserve(body.size() + 8);
  ByteWriter w(out);
  w.u32(static_cast<std::uint32_t>(body.size()));
  w.bytes(body);
  w.u32(crc32(out));
  return out;
}

RecordLog::RecordLog(std::filesystem::path path, const Visitor& visit, bool durable)
    : path_(std::move(path)), durable_(durable) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  fd_.reset(::open(path_.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644));
  if (!fd_.valid()) throw_errno("open", path_);

  Bytes data = read_file(path_);
  std::size_t off = 0;
  const std::size_t n = data.size();
  while (off < n) {
    if (n - off < 4) break;
    ByteReader hdr(ByteView(data).subspan(off, 4));
    const std::uint32_t len = hdr.u32();
    if (len > kMaxBody || n - off < 8ull + len) break;
    ByteView covered(data.data() + off, 4ull + len);
    ByteReader tail(ByteView(data).subspan(off + 4 + len, 4));
    if (crc32(covered) != tail.u32()) {
      // The final entry may be torn; anything followed by more bytes is not.
      if (off + 8 + len == n) break;
      throw LogCorruption(path_, off);
    }
    if (visit) visit(covered.subspan(4));
    off += 8ull + len;
  }
  if (off < n) {
    dropped_tail_ = true;
    if (::ftruncate(fd_.get(), static_cast<off_t>(off)) != 0) throw_errno("ftruncate", path_);
    if (durable_ && ::fdatasync(fd_.get()) != 0) throw_errno("fdatasync", path_);
  }
  size_ = off;
  if (::lseek(fd_.get(), static_cast<off_t>(size_), SEEK_SET) < 0) throw_errno("lseek", path_);
}

void RecordLog::append(ByteView body) {
  Bytes framed = frame_entry(body);
  append_framed(framed);
}

void RecordLog::append_framed(ByteView framed) {
  write_all(fd_.get(), framed.data(), framed.size(), path_);
  size_ += framed.size();
}

void RecordLog::sync() {
  if (durable_ && ::fdatasync(fd_.get()) != 0) throw_errno("fdatasync", path_);
}

void RecordLog::rewrite(const std::vector<Bytes>& bodies) {
  Bytes all;
  for (const auto& b : bodies) {
    Bytes e = frame_entry(b);
    all.insert(all.end(), e.begin(), e.end());
  }
  write_file_atomic(path_, all, durable_);
  fd_.reset(::open(path_.c_str(), O_RDWR | O_CLOEXEC));
  if (!fd_.valid()) throw_errno("open", path_);
  size_ = all.size();
  if (::lseek(fd_.get(), static_cast<off_t>(size_), SEEK_SET) < 0) throw_errno("lseek", path_);
}

}  // namespace gridmon
