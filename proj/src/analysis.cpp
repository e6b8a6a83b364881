#include "phasekey/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phasekey/errors.hpp"

namespace phasekey {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Sums c * log2(c) over the nonzero counts in ascending order. The sorted
// order makes the floating-point sum independent of histogram layout, which
// keeps estimate_mi_binned(x, y) bit-identical to estimate_mi_binned(y, x).
double sum_count_log2(std::vector<std::uint64_t> counts) {
  std::sort(counts.begin(), counts.end());
  double acc = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    double d = static_cast<double>(c);
    acc += d * std::log2(d);
  }
  return acc;
}

int bin_index(double v, const BinRange& r, int bins) {
  double t = (v - r.lo) / (r.hi - r.lo);
  int idx = static_cast<int>(t * bins);
  if (idx < 0) idx = 0;
  if (idx >= bins) idx = bins - 1;  // right edge folds into the last bin
  return idx;
}

}  // namespace

double kuiper_tail_probability(double modified_statistic) {
  const double t = modified_statistic;
  // Below the series' useful range the tail is effectively 1.
  if (t < 0.4) return 1.0;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double k2t2 = static_cast<double>(k) * k * t * t;
    double term = 2.0 * (4.0 * k2t2 - 1.0) * std::exp(-2.0 * k2t2);
    q += term;
    if (std::fabs(term) < 1e-16 && k > 2) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

double kuiper_critical_value(double significance) {
  if (!(significance > 0.0 && significance < 1.0)) {
    throw std::invalid_argument("kuiper_critical_value: significance must be in (0, 1)");
  }
  double lo = 0.4;
  double hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (kuiper_tail_probability(mid) > significance) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

UniformityReport kuiper_uniformity(std::span<const double> phases, double significance) {
  const std::size_t n = phases.size();
  if (n < 50) {
    throw InsufficientSampleError("kuiper_uniformity: need at least 50 samples");
  }
  std::vector<double> u(phases.begin(), phases.end());
  for (double& v : u) v /= kTwoPi;
  std::sort(u.begin(), u.end());
  double d_plus = 0.0;
  double d_minus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f_hi = static_cast<double>(i + 1) / static_cast<double>(n);
    double f_lo = static_cast<double>(i) / static_cast<double>(n);
    d_plus = std::max(d_plus, f_hi - u[i]);
    d_minus = std::max(d_minus, u[i] - f_lo);
  }
  UniformityReport rep;
  rep.statistic = d_plus + d_minus;
  double sqrt_n = std::sqrt(static_cast<double>(n));
  rep.modified_statistic = rep.statistic * (sqrt_n + 0.155 + 0.24 / sqrt_n);
  rep.critical_value = kuiper_critical_value(significance);
  rep.n = n;
  rep.significance = significance;
  rep.pass = rep.modified_statistic < rep.critical_value;
  return rep;
}

UniformityReport kuiper_uniformity(std::span<const Phase> phases, double significance) {
  std::vector<double> values;
  values.reserve(phases.size());
  for (const Phase& p : phases) values.push_back(p.radians());
  return kuiper_uniformity(std::span<const double>(values), significance);
}

BinRange data_bin_range(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("data_bin_range: empty input");
  }
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double l = *lo;
  double h = *hi;
  if (l == h) h = l + 1.0;  // degenerate spread still needs a nonzero width
  return {l, h};
}

JointHistogram::JointHistogram(int bins_x, int bins_y, BinRange range_x, BinRange range_y)
    : bins_x_(bins_x), bins_y_(bins_y), range_x_(range_x), range_y_(range_y) {
  if (bins_x < 1 || bins_y < 1) {
    throw std::invalid_argument("JointHistogram: bins must be >= 1");
  }
  counts_.assign(static_cast<std::size_t>(bins_x) * bins_y, 0);
}

void JointHistogram::add(double x, double y) {
  int ix = bin_index(x, range_x_, bins_x_);
  int iy = bin_index(y, range_y_, bins_y_);
  ++counts_[static_cast<std::size_t>(ix) * bins_y_ + iy];
  ++n_;
}

void JointHistogram::merge(const JointHistogram& other) {
  if (other.bins_x_ != bins_x_ || other.bins_y_ != bins_y_) {
    throw std::invalid_argument("JointHistogram::merge: bin shape mismatch");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  n_ += other.n_;
}

MIEstimate JointHistogram::estimate() const {
  if (n_ == 0) {
    throw std::invalid_argument("JointHistogram::estimate: no samples");
  }
  std::vector<std::uint64_t> row(bins_x_, 0);
  std::vector<std::uint64_t> col(bins_y_, 0);
  for (int i = 0; i < bins_x_; ++i) {
    for (int j = 0; j < bins_y_; ++j) {
      std::uint64_t c = counts_[static_cast<std::size_t>(i) * bins_y_ + j];
      row[i] += c;
      col[j] += c;
    }
  }
  const double n = static_cast<double>(n_);
  // I = (1/n) [ sum c_ij log2 c_ij - sum r_i log2 r_i - sum c_j log2 c_j ] + log2 n
  double mi = (sum_count_log2(counts_) - sum_count_log2(row) - sum_count_log2(col)) / n +
              std::log2(n);
  MIEstimate est;
  est.plugin_bits = mi;
  est.bias_correction =
      static_cast<double>(bins_x_ - 1) * static_cast<double>(bins_y_ - 1) / (2.0 * n * kLn2);
  est.bits = std::max(0.0, mi - est.bias_correction);
  est.bins_x = bins_x_;
  est.bins_y = bins_y_;
  est.n = n_;
  return est;
}

MIEstimate estimate_mi_binned(std::span<const double> x, std::span<const double> y, int bins_x,
                              int bins_y, BinRange range_x, BinRange range_y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("estimate_mi_binned: length mismatch");
  }
  if (x.size() < static_cast<std::size_t>(10) * bins_x * bins_y) {
    throw std::invalid_argument("estimate_mi_binned: undersampled for the bin count");
  }
  JointHistogram hist(bins_x, bins_y, range_x, range_y);
  for (std::size_t i = 0; i < x.size(); ++i) hist.add(x[i], y[i]);
  return hist.estimate();
}

MIEstimate estimate_mi_binned(std::span<const Phase> x, std::span<const Phase> y, int bins_x,
                              int bins_y) {
  std::vector<double> xv;
  std::vector<double> yv;
  xv.reserve(x.size());
  yv.reserve(y.size());
  for (const Phase& p : x) xv.push_back(p.radians());
  for (const Phase& p : y) yv.push_back(p.radians());
  return estimate_mi_binned(std::span<const double>(xv), std::span<const double>(yv), bins_x,
                            bins_y, phase_bin_range(), phase_bin_range());
}

double bit_error_rate(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("bit_error_rate: sequences must match and be non-empty");
  }
  std::size_t errors = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] != 0) != (b[i] != 0)) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(a.size());
}

}  // namespace phasekey
