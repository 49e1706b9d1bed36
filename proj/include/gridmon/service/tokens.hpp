#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace gridmon::service {

enum Scope : std::uint8_t { kRead = 1, kExport = 2, kImport = 4 };

struct ApiToken {
  std::string token;
  std::uint8_t scopes = 0;
  bool all_points = false;
  std::set<std::uint32_t> points;

  bool has(Scope s) const { return (scopes & s) != 0; }
  bool allows(std::uint32_t point_id) const { return all_points || points.count(point_id) != 0; }
};

/// Static token table from `tokens.tsv`:
/// `token<TAB>READ,EXPORT,IMPORT<TAB>point ids comma-separated or *`.
class TokenTable {
 public:
  static TokenTable parse_tsv(std::string_view text);
  static TokenTable load_tsv(const std::filesystem::path& path);

  void add(ApiToken t);
  const ApiToken* find(std::string_view token) const;
  std::size_t size() const { return tokens_.size(); }

 private:
  std::map<std::string, ApiToken, std::less<>> tokens_;
};

}  // namespace gridmon::service
