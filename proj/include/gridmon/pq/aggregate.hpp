#pragma once

#include <span>

#include "gridmon/domain/types.hpp"

namespace gridmon::pq {

// Combines records of one point and resolution that fall into a single
// `target` window. RMS magnitudes (vrms, irms) use the square-mean-root of
// the inputs, every other value the arithmetic mean. Flags are OR-ed, with
// INCOMPLETE added when fewer inputs than the window holds were supplied.
//
// Throws PqError: kEmptyWindow, kMixedKeys, kOutOfWindow,
// kIncompatibleResolution (target not a whole multiple of the input).
BaseRecord aggregate_window(std::span<const BaseRecord> inputs, Resolution target);

}  // namespace gridmon::pq
