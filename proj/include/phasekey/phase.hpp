// Circular arithmetic and complex averaging on phases in [0, 2pi).
#pragma once

#include <complex>
#include <span>

namespace phasekey {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Minimum mean magnitude (relative to unit-power pilots) below which the
// phase of an averaged pilot is treated as meaningless.
inline constexpr double kMeanMagnitudeFloor = 1e-9;

// An angle in [0, 2pi). Construction wraps, so the invariant holds by type.
class Phase {
 public:
  constexpr Phase() = default;
  explicit Phase(double radians);
  [[nodiscard]] double radians() const { return value_; }

 private:
  struct AlreadyWrapped {};
  constexpr Phase(double v, AlreadyWrapped) : value_(v) {}
  friend Phase wrap(double);
  double value_ = 0.0;
};

// Reduces an arbitrary finite angle to [0, 2pi) by floor-based reduction.
// Exact multiples of 2pi map to 0. Throws std::invalid_argument on a
// non-finite input.
Phase wrap(double radians);

// Modulo-2pi sum.
Phase add(Phase a, Phase b);

// Modulo-2pi difference; inverse of add up to rounding.
Phase sub(Phase a, Phase b);

// Shorter arc between two phases, in [0, pi].
double circular_distance(Phase a, Phase b);

// Signed wrapped difference a - b in (-pi, pi]. Handy for error statistics.
double signed_circular_difference(Phase a, Phase b);

// Argument of the arithmetic mean of the samples, wrapped to [0, 2pi).
// Throws std::invalid_argument when empty, DegenerateAverageError when the
// mean magnitude is below kMeanMagnitudeFloor.
Phase complex_mean_phase(std::span<const std::complex<double>> samples);

// Circular mean of a set of phases (argument of the mean unit vector).
Phase circular_mean(std::span<const Phase> phases);

}  // namespace phasekey
