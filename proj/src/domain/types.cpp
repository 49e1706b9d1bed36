#include "gridmon/domain/types.hpp"

#include <bit>

namespace gridmon {
namespace {

constexpr std::array<std::string_view, kParameterCount> kParameterNames = {
    "frequency_hz", "vrms_pu_l1", "vrms_pu_l2", "vrms_pu_l3", "irms_a_l1",
    "irms_a_l2",    "irms_a_l3",  "p_w",        "q_var",      "s_va",
    "thd_v_l1",     "thd_v_l2",   "thd_v_l3",   "unbalance",  "flicker_pst",
};

}  // namespace

std::optional<Resolution> resolution_from_code(std::uint8_t code) {
  if (code > 3) return std::nullopt;
  return static_cast<Resolution>(code);
}

std::string_view resolution_name(Resolution r) {
  switch (r) {
    case Resolution::R100MS: return "100ms";
    case Resolution::R1S: return "1s";
    case Resolution::R3S: return "3s";
    case Resolution::R10MIN: return "10min";
  }
  return "?";
}

std::optional<Resolution> parse_resolution(std::string_view name) {
  for (Resolution r : kAllResolutions)
    if (resolution_name(r) == name) return r;
  return std::nullopt;
}

std::string_view parameter_name(Parameter p) {
  return kParameterNames[static_cast<std::size_t>(p)];
}

std::optional<Parameter> parse_parameter(std::string_view name) {
  for (std::size_t i = 0; i < kParameterNames.size(); ++i)
    if (kParameterNames[i] == name) return static_cast<Parameter>(i);
  return std::nullopt;
}

namespace {

template <class Rec>
auto& field(Rec& r, Parameter p) {
  switch (p) {
    case Parameter::kFrequencyHz: return r.frequency_hz;
    case Parameter::kVrmsPuL1: return r.vrms_pu[0];
    case Parameter::kVrmsPuL2: return r.vrms_pu[1];
    case Parameter::kVrmsPuL3: return r.vrms_pu[2];
    case Parameter::kIrmsAL1: return r.irms_a[0];
    case Parameter::kIrmsAL2: return r.irms_a[1];
    case Parameter::kIrmsAL3: return r.irms_a[2];
    case Parameter::kPW: return r.p_w;
    case Parameter::kQVar: return r.q_var;
    case Parameter::kSVa: return r.s_va;
    case Parameter::kThdVL1: return r.thd_v[0];
    case Parameter::kThdVL2: return r.thd_v[1];
    case Parameter::kThdVL3: return r.thd_v[2];
    case Parameter::kUnbalance: return r.unbalance;
    case Parameter::kFlickerPst: return r.flicker_pst;
  }
  return r.flicker_pst;
}

}  // namespace

double parameter_value(const BaseRecord& r, Parameter p) { return field(r, p); }
void set_parameter(BaseRecord& r, Parameter p, double value) { field(r, p) = value; }

bool bitwise_equal(const BaseRecord& a, const BaseRecord& b) {
  if (a.point_id != b.point_id || a.ts_ms != b.ts_ms || a.resolution != b.resolution ||
      a.flags != b.flags)
    return false;
  for (std::size_t i = 0; i < kParameterCount; ++i) {
    const auto p = static_cast<Parameter>(i);
    if (std::bit_cast<std::uint64_t>(parameter_value(a, p)) !=
        std::bit_cast<std::uint64_t>(parameter_value(b, p)))
      return false;
  }
  return true;
}

std::string_view event_type_name(EventType t) {
  switch (t) {
    case EventType::kSag: return "SAG";
    case EventType::kSwell: return "SWELL";
    case EventType::kInterruption: return "INTERRUPTION";
  }
  return "?";
}

std::optional<EventType> parse_event_type(std::string_view name) {
  for (auto t : {EventType::kSag, EventType::kSwell, EventType::kInterruption})
    if (event_type_name(t) == name) return t;
  return std::nullopt;
}

std::optional<EventType> event_type_from_code(std::uint8_t code) {
  if (code < 1 || code > 3) return std::nullopt;
  return static_cast<EventType>(code);
}

}  // namespace gridmon
