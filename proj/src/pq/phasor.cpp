#include "gridmon/pq/phasor.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gridmon::pq {

double normalize_angle_deg(double deg) {
  double a = std::fmod(deg + 180.0, 360.0);
  if (a < 0) a += 360.0;
  a -= 180.0;
  // fmod rounding can land exactly on +180.
  return a >= 180.0 ? a - 360.0 : a;
}

Phasor::Phasor(double magnitude, double angle_deg)
    : magnitude_(magnitude), angle_deg_(normalize_angle_deg(angle_deg)) {
  if (!(magnitude >= 0.0)) throw std::invalid_argument("phasor magnitude must be >= 0");
}

Phasor Phasor::from_complex(std::complex<double> z) {
  return Phasor(std::abs(z), std::arg(z) * 180.0 / std::numbers::pi);
}

std::complex<double> Phasor::to_complex() const {
  return std::polar(magnitude_, angle_deg_ * std::numbers::pi / 180.0);
}

}  // namespace gridmon::pq
