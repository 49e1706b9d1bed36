#pragma once

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>

#include "gridmon/pq/phasor.hpp"

namespace gridmon::pq {

enum class PqErrc {
  kDegenerate,
  kZeroFundamental,
  kBadHarmonicOrder,
  kEmptyWindow,
  kMixedKeys,
  kOutOfWindow,
  kIncompatibleResolution,
  kNonMonotonicTs,
};

class PqError : public std::runtime_error {
 public:
  PqError(PqErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  PqErrc code() const { return code_; }

 private:
  PqErrc code_;
};

/// Fortescue decomposition of a three-phase set. Components are kept as
/// complex values so callers can reconstruct the inputs exactly; the
/// Phasor accessors are for presentation.
struct SequenceComponents {
  std::complex<double> positive;
  std::complex<double> negative;
  std::complex<double> zero;
  double u2 = 0.0;  // |negative| / |positive|

  Phasor v_pos() const { return Phasor::from_complex(positive); }
  Phasor v_neg() const { return Phasor::from_complex(negative); }
  Phasor v_zero() const { return Phasor::from_complex(zero); }
};

// Throws PqError(kDegenerate) when |positive| < 1e-12.
SequenceComponents symmetrical_unbalance(const Phasor& va, const Phasor& vb, const Phasor& vc);

struct Harmonic {
  int order = 0;           // 2..50
  double magnitude = 0.0;  // RMS, same unit as the fundamental
};

// sqrt(sum of squared harmonic magnitudes) / fundamental.
double thd(double fundamental, std::span<const Harmonic> harmonics);

struct PowerTriplet {
  double p_w = 0.0;
  double q_var = 0.0;
  double s_va = 0.0;  // arithmetic: sum of per-phase V*I
};

PowerTriplet power_triplet(const std::array<Phasor, 3>& voltages,
                           const std::array<Phasor, 3>& currents);

}  // namespace gridmon::pq
