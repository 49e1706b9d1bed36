#include "gridmon/wire/keyring.hpp"

#include <charconv>
#include <random>

#include "gridmon/common/record_log.hpp"
#include "gridmon/domain/registry.hpp"

namespace gridmon::wire {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

Keyring Keyring::parse_tsv(std::string_view text) {
  Keyring ring;
  int line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    auto fail = [&](const char* why) {
      return ConfigError("keys.tsv line " + std::to_string(line_no) + ": " + why);
    };
    if (tab == std::string_view::npos) throw fail("expected device_id<TAB>key");
    auto id_text = line.substr(0, tab);
    auto hex = line.substr(tab + 1);
    std::uint32_t id = 0;
    auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
    if (ec != std::errc{} || ptr != id_text.data() + id_text.size()) throw fail("bad device_id");
    if (hex.size() != 32) throw fail("key must be 32 hex characters");
    Key key{};
    for (std::size_t i = 0; i < 16; ++i) {
      int hi = hex_value(hex[2 * i]), lo = hex_value(hex[2 * i + 1]);
      if (hi < 0 || lo < 0) throw fail("key is not hex");
      key[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    if (ring.find(id)) throw fail("duplicate device_id");
    ring.add(id, key);
  }
  return ring;
}

Keyring Keyring::load_tsv(const std::filesystem::path& path) {
  Bytes data = read_file(path);
  return parse_tsv(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

void Keyring::add(std::uint32_t device_id, const Key& key) { keys_[device_id] = key; }

const Key* Keyring::find(std::uint32_t device_id) const {
  auto it = keys_.find(device_id);
  return it == keys_.end() ? nullptr : &it->second;
}

KeyLookup Keyring::lookup() const {
  return [this](std::uint32_t id) { return find(id); };
}

std::string Keyring::to_tsv() const {
  std::string out;
  for (const auto& [id, key] : keys_) out += std::to_string(id) + "\t" + to_hex(key) + "\n";
  return out;
}

Key Keyring::derive_demo_key(std::uint64_t seed, std::uint32_t device_id) {
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * (device_id + 1ull)));
  Key k{};
  for (std::size_t i = 0; i < k.size(); i += 8) {
    std::uint64_t v = rng();
    for (std::size_t j = 0; j < 8; ++j) k[i + j] = static_cast<std::uint8_t>(v >> (8 * j));
  }
  return k;
}

}  // namespace gridmon::wire
