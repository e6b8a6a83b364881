#include "phasekey/phase.hpp"

#include <cmath>
#include <stdexcept>

#include "phasekey/errors.hpp"

namespace phasekey {

Phase::Phase(double radians) { *this = wrap(radians); }

Phase wrap(double radians) {
  if (!std::isfinite(radians)) {
    throw std::invalid_argument("wrap: angle must be finite");
  }
  double r = radians - kTwoPi * std::floor(radians / kTwoPi);
  // floor-based reduction can land exactly on 2pi when the quotient rounds
  // down; fold that boundary back to 0 to keep the interval half-open.
  if (r >= kTwoPi) r -= kTwoPi;
  if (r < 0.0) r = 0.0;
  return Phase(r, Phase::AlreadyWrapped{});
}

Phase add(Phase a, Phase b) { return wrap(a.radians() + b.radians()); }

Phase sub(Phase a, Phase b) { return wrap(a.radians() - b.radians()); }

double circular_distance(Phase a, Phase b) {
  double d = std::fabs(a.radians() - b.radians());
  return std::min(d, kTwoPi - d);
}

double signed_circular_difference(Phase a, Phase b) {
  double d = a.radians() - b.radians();
  if (d > kTwoPi / 2.0) d -= kTwoPi;
  if (d <= -kTwoPi / 2.0) d += kTwoPi;
  return d;
}

Phase complex_mean_phase(std::span<const std::complex<double>> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("complex_mean_phase: need at least one sample");
  }
  std::complex<double> acc{0.0, 0.0};
  for (const auto& s : samples) acc += s;
  acc /= static_cast<double>(samples.size());
  if (std::abs(acc) < kMeanMagnitudeFloor) {
    throw DegenerateAverageError("complex_mean_phase: mean magnitude below floor");
  }
  return wrap(std::arg(acc));
}

Phase circular_mean(std::span<const Phase> phases) {
  if (phases.empty()) {
    throw std::invalid_argument("circular_mean: need at least one phase");
  }
  std::complex<double> acc{0.0, 0.0};
  for (const auto& p : phases) acc += std::polar(1.0, p.radians());
  acc /= static_cast<double>(phases.size());
  if (std::abs(acc) < kMeanMagnitudeFloor) {
    throw DegenerateAverageError("circular_mean: mean magnitude below floor");
  }
  return wrap(std::arg(acc));
}

}  // namespace phasekey
