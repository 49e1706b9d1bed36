#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "gridmon/wire/frame.hpp"

namespace gridmon::wire {

/// Pre-shared per-device keys, loaded from `keys.tsv`
/// (`device_id<TAB>32 hex chars`, `#` comments allowed).
class Keyring {
 public:
  Keyring() = default;

  static Keyring parse_tsv(std::string_view text);
  static Keyring load_tsv(const std::filesystem::path& path);

  void add(std::uint32_t device_id, const Key& key);
  const Key* find(std::uint32_t device_id) const;
  std::size_t size() const { return keys_.size(); }
  KeyLookup lookup() const;

  std::string to_tsv() const;

  // Deterministic key derivation for demos and tests; not for production.
  static Key derive_demo_key(std::uint64_t seed, std::uint32_t device_id);

 private:
  std::map<std::uint32_t, Key> keys_;
};

std::string to_hex(ByteView bytes);

}  // namespace gridmon::wire
