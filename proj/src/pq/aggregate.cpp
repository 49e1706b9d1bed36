#include "gridmon/pq/aggregate.hpp"

#include <cmath>

#include "gridmon/pq/kernels.hpp"

namespace gridmon::pq {

BaseRecord aggregate_window(std::span<const BaseRecord> inputs, Resolution target) {
  if (inputs.empty()) throw PqError(PqErrc::kEmptyWindow, "no records in window");

  const BaseRecord& first = inputs.front();
  const std::uint64_t in_ms = duration_ms(first.resolution);
  const std::uint64_t out_ms = duration_ms(target);
  if (out_ms < in_ms || out_ms % in_ms != 0)
    throw PqError(PqErrc::kIncompatibleResolution, "target resolution is not a multiple of input");

  const EpochMs window = window_align(first.ts_ms, target);
  std::array<double, 3> v_sq{}, i_sq{}, thd{};
  double freq = 0, p = 0, q = 0, s = 0, unb = 0, pst = 0;
  std::uint8_t flags = 0;

  for (const BaseRecord& r : inputs) {
    if (r.point_id != first.point_id || r.resolution != first.resolution)
      throw PqError(PqErrc::kMixedKeys, "inputs differ in point or resolution");
    if (window_align(r.ts_ms, target) != window)
      throw PqError(PqErrc::kOutOfWindow, "input outside the target window");
    for (std::size_t k = 0; k < 3; ++k) {
      v_sq[k] += r.vrms_pu[k] * r.vrms_pu[k];
      i_sq[k] += r.irms_a[k] * r.irms_a[k];
      thd[k] += r.thd_v[k];
    }
    freq += r.frequency_hz;
    p += r.p_w;
    q += r.q_var;
    s += r.s_va;
    unb += r.unbalance;
    pst += r.flicker_pst;
    flags |= r.flags;
  }

  const double n = static_cast<double>(inputs.size());
  BaseRecord out;
  out.point_id = first.point_id;
  out.ts_ms = window;
  out.resolution = target;
  out.flags = flags;
  if (inputs.size() < out_ms / in_ms) out.flags |= record_flags::kIncomplete;
  out.frequency_hz = freq / n;
  for (std::size_t k = 0; k < 3; ++k) {
    out.vrms_pu[k] = std::sqrt(v_sq[k] / n);
    out.irms_a[k] = std::sqrt(i_sq[k] / n);
    out.thd_v[k] = thd[k] / n;
  }
  out.p_w = p / n;
  out.q_var = q / n;
  out.s_va = s / n;
  out.unbalance = unb / n;
  out.flicker_pst = pst / n;
  return out;
}

}  // namespace gridmon::pq
