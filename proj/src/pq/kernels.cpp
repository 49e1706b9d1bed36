#include "gridmon/pq/kernels.hpp"

#include <bitset>
#include <cmath>
#include <numbers>

namespace gridmon::pq {

SequenceComponents symmetrical_unbalance(const Phasor& va, const Phasor& vb, const Phasor& vc) {
  const std::complex<double> a = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  const std::complex<double> a2 = a * a;
  const auto A = va.to_complex();
  const auto B = vb.to_complex();
  const auto C = vc.to_complex();

  SequenceComponents out;
  out.positive = (A + a * B + a2 * C) / 3.0;
  out.negative = (A + a2 * B + a * C) / 3.0;
  out.zero = (A + B + C) / 3.0;
  const double pos = std::abs(out.positive);
  if (pos < 1e-12) throw PqError(PqErrc::kDegenerate, "positive sequence vanishes; u2 undefined");
  out.u2 = std::abs(out.negative) / pos;
  return out;
}

double thd(double fundamental, std::span<const Harmonic> harmonics) {
  if (!(fundamental > 0.0)) throw PqError(PqErrc::kZeroFundamental, "fundamental must be > 0");
  std::bitset<51> seen;
  double sum_sq = 0.0;
  for (const auto& h : harmonics) {
    if (h.order < 2 || h.order > 50 || seen.test(static_cast<std::size_t>(h.order)))
      throw PqError(PqErrc::kBadHarmonicOrder,
                    "harmonic order " + std::to_string(h.order) + " invalid or repeated");
    seen.set(static_cast<std::size_t>(h.order));
    sum_sq += h.magnitude * h.magnitude;
  }
  return std::sqrt(sum_sq) / fundamental;
}

PowerTriplet power_triplet(const std::array<Phasor, 3>& voltages,
                           const std::array<Phasor, 3>& currents) {
  PowerTriplet out;
  for (std::size_t k = 0; k < 3; ++k) {
    const double vi = voltages[k].magnitude() * currents[k].magnitude();
    const double phi = (voltages[k].angle_deg() - currents[k].angle_deg()) * std::numbers::pi / 180.0;
    out.p_w += vi * std::cos(phi);
    out.q_var += vi * std::sin(phi);
    out.s_va += vi;
  }
  return out;
}

}  // namespace gridmon::pq
