#include "gridmon/device/synth.hpp"

#include <stdexcept>

#include "gridmon/pq/kernels.hpp"

namespace gridmon::device {
namespace {

constexpr double kNominalFrequencyHz = 50.0;
constexpr double kBaseCurrentA = 10.0;
constexpr std::array<double, 3> kPhaseAngleDeg = {0.0, -120.0, 120.0};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint32_t point_id, std::uint64_t t_s) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ splitmix64(point_id)) ^ t_s));
}

SynthSample synthesize_base_record(const Scenario& scenario, std::uint32_t point_id,
                                   std::uint64_t t_s) {
  const DeviceSpec* dev = scenario.find_device(point_id);
  if (!dev) throw std::invalid_argument("no device for point " + std::to_string(point_id));
  auto rng = sample_rng(scenario.seed, point_id, t_s);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> thd_dist(0.01, 0.03);
  std::uniform_real_distribution<double> pf_angle(5.0, 30.0);

  const double sigma = dev->noise_sigma_pu;
  std::array<double, 3> vrms{};
  for (auto& v : vrms) v = std::max(0.0, 1.0 + sigma * noise(rng));

  for (const auto& inj : scenario.injected) {
    if (inj.kind == InjectionKind::kLinkOutage || inj.point_id != point_id || !inj.active_at(t_s))
      continue;
    for (std::size_t k = 0; k < 3; ++k)
      if (inj.phase_mask & (1u << k)) vrms[k] = inj.depth_pu;
  }

  BaseRecord r;
  r.point_id = point_id;
  r.ts_ms = scenario.start_ms + t_s * 1000;
  r.resolution = Resolution::R1S;
  r.frequency_hz = kNominalFrequencyHz + 2.0 * sigma * unit(rng);
  for (auto& t : r.thd_v) t = thd_dist(rng);
  r.vrms_pu = vrms;
  r.flicker_pst = 0.0;

  const double phi = pf_angle(rng);
  std::array<pq::Phasor, 3> v, i;
  for (std::size_t k = 0; k < 3; ++k) {
    const double base_i = kBaseCurrentA * (1.0 + 0.05 * unit(rng));
    r.irms_a[k] = base_i * vrms[k];
    v[k] = pq::Phasor(vrms[k] * dev->nominal_voltage_v, kPhaseAngleDeg[k]);
    i[k] = pq::Phasor(r.irms_a[k], kPhaseAngleDeg[k] - phi);
  }
  const auto power = pq::power_triplet(v, i);
  r.p_w = power.p_w;
  r.q_var = power.q_var;
  r.s_va = power.s_va;

  try {
    r.unbalance = pq::symmetrical_unbalance(v[0], v[1], v[2]).u2;
  } catch (const pq::PqError&) {
    r.unbalance = 0.0;  // all phases collapsed
  }
  return SynthSample{r, vrms};
}

}  // namespace gridmon::device
