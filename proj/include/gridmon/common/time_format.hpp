#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "gridmon/common/clock.hpp"

namespace gridmon {

// Accepts either non-negative epoch milliseconds ("1700000400000") or an
// ISO-8601 UTC instant ("2023-11-14T22:20:00Z", optional ".fff" fraction,
// "Z" or "+00:00" suffix, or no suffix meaning UTC).
std::optional<EpochMs> parse_timestamp(std::string_view text);

std::string format_iso8601(EpochMs ts);

}  // namespace gridmon
