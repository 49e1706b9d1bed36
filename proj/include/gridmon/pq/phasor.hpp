#pragma once

#include <complex>

namespace gridmon::pq {

/// RMS magnitude and angle in degrees, angle kept in [-180, 180).
class Phasor {
 public:
  Phasor() = default;
  Phasor(double magnitude, double angle_deg);

  static Phasor from_complex(std::complex<double> z);

  double magnitude() const { return magnitude_; }
  double angle_deg() const { return angle_deg_; }
  std::complex<double> to_complex() const;

 private:
  double magnitude_ = 0.0;
  double angle_deg_ = 0.0;
};

double normalize_angle_deg(double deg);

}  // namespace gridmon::pq
