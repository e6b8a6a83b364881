// Times the Monte-Carlo kernels serial vs OpenMP and checks the two paths
// agree. Not part of the test suite; run by hand when touching kernels.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "phasekey/kernels.hpp"

using namespace phasekey;

namespace {

double time_ms(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const std::string& name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-28s %10.1f ms %10.1f ms   x%.2f   %s\n", name.c_str(), serial_ms, parallel_ms,
              serial_ms / parallel_ms, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both columns run serially\n");
#endif
  std::printf("%-28s %13s %13s\n", "kernel", "serial", "parallel");

  {
    std::vector<double> a, b;
    double ts = time_ms([&] { a = masked_phase_samples(7, 2'000'000, 1.0, Exec::serial); });
    double tp = time_ms([&] { b = masked_phase_samples(7, 2'000'000, 1.0, Exec::parallel); });
    report("masked_phase_samples 2e6", ts, tp, a == b);
  }
  {
    LeakageResult a, b;
    double ts = time_ms([&] {
      a = eavesdropper_leakage(ProtocolKind::two_antenna, 7, 200'000, 2, Exec::serial);
    });
    double tp = time_ms([&] {
      b = eavesdropper_leakage(ProtocolKind::two_antenna, 7, 200'000, 2, Exec::parallel);
    });
    bool same = a.max_mi_bits == b.max_mi_bits;
    report("leakage_two 2e5", ts, tp, same);
  }
  {
    KeyExchangeParams params;
    ExchangeAggregate a, b;
    double ts = time_ms([&] { a = exchange_synthetic(7, 200, params, 0.15, 0.0, Exec::serial); });
    double tp = time_ms([&] { b = exchange_synthetic(7, 200, params, 0.15, 0.0, Exec::parallel); });
    bool same = a.agreement_rate == b.agreement_rate && a.eve_info_ber == b.eve_info_ber;
    report("exchange_synthetic 200", ts, tp, same);
  }
  {
    PilotGainResult a, b;
    double ts = time_ms([&] { a = pilot_averaging_gain(7, 10'000, 20.0, 16, Exec::serial); });
    double tp = time_ms([&] { b = pilot_averaging_gain(7, 10'000, 20.0, 16, Exec::parallel); });
    report("pilot_averaging_gain 1e4", ts, tp, a.ratio == b.ratio);
  }
  return 0;
}
