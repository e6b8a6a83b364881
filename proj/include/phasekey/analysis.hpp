// Statistical verification instruments: Kuiper circular-uniformity test,
// binned mutual-information estimation with Miller-Madow bias correction,
// and error-rate counters.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "phasekey/phase.hpp"

namespace phasekey {

struct UniformityReport {
  double statistic = 0.0;           // Kuiper V_n
  double modified_statistic = 0.0;  // V_n * (sqrt(n) + 0.155 + 0.24/sqrt(n))
  double critical_value = 0.0;
  std::size_t n = 0;
  double significance = 0.0;
  bool pass = false;
};

// Upper-tail probability of the modified Kuiper statistic (asymptotic series).
double kuiper_tail_probability(double modified_statistic);

// Critical value of the modified statistic at the given significance.
double kuiper_critical_value(double significance);

// Kuiper goodness-of-fit against the uniform distribution on [0, 2pi).
// Rotation-invariant, so correct for circular data. Requires n >= 50
// (InsufficientSampleError otherwise).
UniformityReport kuiper_uniformity(std::span<const double> phases, double significance);
UniformityReport kuiper_uniformity(std::span<const Phase> phases, double significance);

struct BinRange {
  double lo = 0.0;
  double hi = 1.0;
};

inline constexpr BinRange phase_bin_range() { return {0.0, kTwoPi}; }

// Empirical [min, max] of the data, for non-phase variables.
BinRange data_bin_range(std::span<const double> values);

struct MIEstimate {
  double bits = 0.0;             // bias-corrected, floored at 0
  double plugin_bits = 0.0;      // raw plug-in estimate
  double bias_correction = 0.0;  // (Bx-1)(By-1) / (2 n ln 2)
  int bins_x = 0;
  int bins_y = 0;
  std::size_t n = 0;
};

// Mergeable joint histogram over fixed equal-width bins. Counts are integers,
// so parallel shards merge to an order-independent result.
class JointHistogram {
 public:
  JointHistogram(int bins_x, int bins_y, BinRange range_x, BinRange range_y);
  void add(double x, double y);
  void merge(const JointHistogram& other);
  [[nodiscard]] MIEstimate estimate() const;
  [[nodiscard]] std::size_t samples() const { return n_; }

 private:
  int bins_x_;
  int bins_y_;
  BinRange range_x_;
  BinRange range_y_;
  std::size_t n_ = 0;
  std::vector<std::uint64_t> counts_;  // row-major [ix * bins_y + iy]
};

// Binned plug-in MI with Miller-Madow correction, floored at 0 for reporting.
// Requires |x| == |y| and n >= 10 * bins_x * bins_y.
MIEstimate estimate_mi_binned(std::span<const double> x, std::span<const double> y, int bins_x,
                              int bins_y, BinRange range_x, BinRange range_y);

// Convenience overload for two circular variables on [0, 2pi).
MIEstimate estimate_mi_binned(std::span<const Phase> x, std::span<const Phase> y, int bins_x,
                              int bins_y);

// Hamming distance divided by length; lengths must match and be >= 1.
double bit_error_rate(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

}  // namespace phasekey
