#pragma once

#include <optional>
#include <string_view>

#include "gridmon/domain/registry.hpp"
#include "gridmon/domain/types.hpp"

namespace gridmon {

enum class Rejection {
  kUnknownPoint,
  kMisalignedTs,
  kNonFinite,
  kNegativeField,
  kPowerInconsistent,
};

std::string_view rejection_name(Rejection r);

// Checks the record invariants in a fixed order and reports the first one
// violated; nullopt means the record is acceptable.
std::optional<Rejection> validate_record(const BaseRecord& r, const PointRegistry& registry);

}  // namespace gridmon
