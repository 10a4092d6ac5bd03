#pragma once

#include "pbsched/types.hpp"

namespace pbsched {

/// One sensor sample of the pack. load_true is ground truth carried for
/// analysis only; the scheduler never reads it.
template <typename Scalar = double>
struct Measurement {
  long long tick = 0;
  Scalar time = 0;   // seconds
  Scalar v_bus = 0;  // volts
  Scalar i_bus = 0;  // amperes
  Vector<Scalar> module_currents;
  Scalar load_true = 0;
};

}  // namespace pbsched
