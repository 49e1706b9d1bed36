#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "gridmon/common/clock.hpp"

namespace gridmon {

/// Averaging resolutions, ordered by window length. The numeric value is the
/// wire/segment resolution code.
enum class Resolution : std::uint8_t { R100MS = 0, R1S = 1, R3S = 2, R10MIN = 3 };

inline constexpr std::array<Resolution, 4> kAllResolutions = {
    Resolution::R100MS, Resolution::R1S, Resolution::R3S, Resolution::R10MIN};

constexpr std::uint64_t duration_ms(Resolution r) {
  switch (r) {
    case Resolution::R100MS: return 100;
    case Resolution::R1S: return 1000;
    case Resolution::R3S: return 3000;
    case Resolution::R10MIN: return 600000;
  }
  return 0;
}

constexpr std::uint8_t resolution_code(Resolution r) { return static_cast<std::uint8_t>(r); }
std::optional<Resolution> resolution_from_code(std::uint8_t code);

// "100ms", "1s", "3s", "10min"
std::string_view resolution_name(Resolution r);
std::optional<Resolution> parse_resolution(std::string_view name);

/// Largest multiple of the resolution's window that is <= ts (window start).
constexpr EpochMs window_align(EpochMs ts, Resolution r) {
  const std::uint64_t d = duration_ms(r);
  return ts - ts % d;
}

constexpr bool is_aligned(EpochMs ts, Resolution r) { return ts % duration_ms(r) == 0; }

struct MeasurementPoint {
  std::uint32_t point_id = 0;
  std::string name;
  double nominal_voltage_v = 230.0;
  double nominal_frequency_hz = 50.0;
};

namespace record_flags {
inline constexpr std::uint8_t kIncomplete = 0x01;
inline constexpr std::uint8_t kClockUnsynced = 0x02;
}  // namespace record_flags

/// One fixed-layout measurement of every stored PQ parameter for one point,
/// one window start and one resolution. Voltages are per-unit of nominal.
struct BaseRecord {
  std::uint32_t point_id = 0;
  EpochMs ts_ms = 0;
  Resolution resolution = Resolution::R1S;
  std::uint8_t flags = 0;
  double frequency_hz = 0.0;
  std::array<double, 3> vrms_pu{};
  std::array<double, 3> irms_a{};
  double p_w = 0.0;
  double q_var = 0.0;
  double s_va = 0.0;
  std::array<double, 3> thd_v{};
  double unbalance = 0.0;
  double flicker_pst = 0.0;  // carried through, never computed

  bool operator==(const BaseRecord&) const = default;
};

/// Stored value columns in wire order.
enum class Parameter : std::uint8_t {
  kFrequencyHz,
  kVrmsPuL1,
  kVrmsPuL2,
  kVrmsPuL3,
  kIrmsAL1,
  kIrmsAL2,
  kIrmsAL3,
  kPW,
  kQVar,
  kSVa,
  kThdVL1,
  kThdVL2,
  kThdVL3,
  kUnbalance,
  kFlickerPst,
};

inline constexpr std::size_t kParameterCount = 15;

std::string_view parameter_name(Parameter p);
std::optional<Parameter> parse_parameter(std::string_view name);
double parameter_value(const BaseRecord& r, Parameter p);
void set_parameter(BaseRecord& r, Parameter p, double value);

// Equality on bit patterns (distinguishes -0.0 from 0.0, equal NaNs match).
bool bitwise_equal(const BaseRecord& a, const BaseRecord& b);

enum class EventType : std::uint8_t { kSag = 1, kSwell = 2, kInterruption = 3 };

std::string_view event_type_name(EventType t);  // "SAG", "SWELL", "INTERRUPTION"
std::optional<EventType> parse_event_type(std::string_view name);
std::optional<EventType> event_type_from_code(std::uint8_t code);

/// A closed voltage event on one or more phases (bit 0 = L1).
struct PQEvent {
  std::uint32_t point_id = 0;
  EventType type = EventType::kSag;
  std::uint8_t phase_mask = 0;
  EpochMs start_ms = 0;
  EpochMs end_ms = 0;
  double extreme_pu = 0.0;

  bool operator==(const PQEvent&) const = default;
};

}  // namespace gridmon
