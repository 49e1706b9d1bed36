#include "gridmon/domain/validate.hpp"

#include <algorithm>
#include <cmath>

namespace gridmon {

std::string_view rejection_name(Rejection r) {
  switch (r) {
    case Rejection::kUnknownPoint: return "UNKNOWN_POINT";
    case Rejection::kMisalignedTs: return "MISALIGNED_TS";
    case Rejection::kNonFinite: return "NON_FINITE";
    case Rejection::kNegativeField: return "NEGATIVE_FIELD";
    case Rejection::kPowerInconsistent: return "POWER_INCONSISTENT";
  }
  return "?";
}

std::optional<Rejection> validate_record(const BaseRecord& r, const PointRegistry& registry) {
  if (!registry.contains(r.point_id)) return Rejection::kUnknownPoint;
  if (!is_aligned(r.ts_ms, r.resolution)) return Rejection::kMisalignedTs;

  for (std::size_t i = 0; i < kParameterCount; ++i)
    if (!std::isfinite(parameter_value(r, static_cast<Parameter>(i)))) return Rejection::kNonFinite;

  auto negative = [](double v) { return v < 0.0; };
  if (std::any_of(r.vrms_pu.begin(), r.vrms_pu.end(), negative) ||
      std::any_of(r.irms_a.begin(), r.irms_a.end(), negative) ||
      std::any_of(r.thd_v.begin(), r.thd_v.end(), negative) || r.unbalance < 0.0 || r.s_va < 0.0)
    return Rejection::kNegativeField;

  // s^2 >= p^2 with 1e-6 relative slack.
  const double s2 = r.s_va * r.s_va;
  const double p2 = r.p_w * r.p_w;
  if (s2 < p2 && (p2 - s2) > 1e-6 * p2) return Rejection::kPowerInconsistent;
  return std::nullopt;
}

}  // namespace gridmon
