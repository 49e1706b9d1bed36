#include "gridmon/service/tokens.hpp"

#include <charconv>

#include "gridmon/common/record_log.hpp"
#include "gridmon/domain/registry.hpp"

namespace gridmon::service {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

TokenTable TokenTable::parse_tsv(std::string_view text) {
  TokenTable table;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3)
      throw ConfigError("tokens line " + std::to_string(line_no) + ": expected 3 tab-separated columns");
    ApiToken t;
    t.token = std::string(trim(cols[0]));
    if (t.token.empty()) throw ConfigError("tokens line " + std::to_string(line_no) + ": empty token");
    for (auto s : split(cols[1], ',')) {
      s = trim(s);
      if (s == "READ") t.scopes |= kRead;
      else if (s == "EXPORT") t.scopes |= kExport;
      else if (s == "IMPORT") t.scopes |= kImport;
      else if (!s.empty())
        throw ConfigError("tokens line " + std::to_string(line_no) + ": unknown scope '" + std::string(s) + "'");
    }
    auto pts = trim(cols[2]);
    if (pts == "*") {
      t.all_points = true;
    } else {
      for (auto p : split(pts, ',')) {
        p = trim(p);
        if (p.empty()) continue;
        std::uint32_t id = 0;
        auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), id);
        if (ec != std::errc{} || ptr != p.data() + p.size())
          throw ConfigError("tokens line " + std::to_string(line_no) + ": bad point id '" + std::string(p) + "'");
        t.points.insert(id);
      }
    }
    if (table.find(t.token)) throw ConfigError("tokens line " + std::to_string(line_no) + ": duplicate token");
    table.add(std::move(t));
  }
  return table;
}

TokenTable TokenTable::load_tsv(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  return parse_tsv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void TokenTable::add(ApiToken t) {
  auto key = t.token;
  tokens_[key] = std::move(t);
}

const ApiToken* TokenTable::find(std::string_view token) const {
  auto it = tokens_.find(token);
  return it == tokens_.end() ? nullptr : &it->second;
}

}  // namespace gridmon::service
