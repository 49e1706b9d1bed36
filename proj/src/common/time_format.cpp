#include "gridmon/common/time_format.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace gridmon {
namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace

std::optional<EpochMs> parse_timestamp(std::string_view text) {
  if (all_digits(text)) {
    EpochMs v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return v;
  }

  // YYYY-MM-DDTHH:MM:SS
  if (text.size() < 19 || text[4] != '-' || text[7] != '-' ||
      (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':')
    return std::nullopt;
  int year, mon, day, hour, min, sec;
  if (!all_digits(text.substr(0, 4)) || !parse_int(text.substr(0, 4), year) ||
      !all_digits(text.substr(5, 2)) || !parse_int(text.substr(5, 2), mon) ||
      !all_digits(text.substr(8, 2)) || !parse_int(text.substr(8, 2), day) ||
      !all_digits(text.substr(11, 2)) || !parse_int(text.substr(11, 2), hour) ||
      !all_digits(text.substr(14, 2)) || !parse_int(text.substr(14, 2), min) ||
      !all_digits(text.substr(17, 2)) || !parse_int(text.substr(17, 2), sec))
    return std::nullopt;
  if (hour > 23 || min > 59 || sec > 59) return std::nullopt;

  std::string_view rest = text.substr(19);
  int millis = 0;
  if (!rest.empty() && rest.front() == '.') {
    std::size_t n = 1;
    while (n < rest.size() && rest[n] >= '0' && rest[n] <= '9') ++n;
    std::string_view frac = rest.substr(1, n - 1);
    if (frac.empty()) return std::nullopt;
    // Keep millisecond precision, truncating finer digits.
    int scale = 100;
    for (std::size_t i = 0; i < frac.size() && i < 3; ++i) {
      millis += (frac[i] - '0') * scale;
      scale /= 10;
    }
    rest = rest.substr(n);
  }
  if (!(rest.empty() || rest == "Z" || rest == "+00:00")) return std::nullopt;

  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(mon)},
                     std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  auto days = sys_days{ymd}.time_since_epoch().count();
  if (days < 0) return std::nullopt;
  return static_cast<EpochMs>(days) * 86'400'000ULL +
         static_cast<EpochMs>(hour) * 3'600'000ULL + static_cast<EpochMs>(min) * 60'000ULL +
         static_cast<EpochMs>(sec) * 1000ULL + static_cast<EpochMs>(millis);
}

std::string format_iso8601(EpochMs ts) {
  using namespace std::chrono;
  sys_days day{days{static_cast<long>(ts / 86'400'000ULL)}};
  year_month_day ymd{day};
  EpochMs rem = ts % 86'400'000ULL;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u:%02u.%03uZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), unsigned(rem / 3'600'000),
                unsigned(rem / 60'000 % 60), unsigned(rem / 1000 % 60), unsigned(rem % 1000));
  return buf;
}

}  // namespace gridmon
