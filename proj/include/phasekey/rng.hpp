// Deterministic stream derivation for Monte-Carlo work.
//
// Every random quantity in the simulator is drawn from a stream keyed by
// (seed, tags...). Independent rounds derive independent streams, so results
// do not depend on execution order or thread count.
#pragma once

#include <cstdint>
#include <random>

#include "phasekey/phase.hpp"

namespace phasekey {

// SplitMix64 avalanche finalizer.
constexpr std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t z) {
  return splitmix_finalize(z + 0x9e3779b97f4a7c15ull);
}

// Folds tag values into a single 64-bit stream key.
constexpr std::uint64_t stream_key(std::uint64_t seed) { return mix64(seed); }

template <typename... Tags>
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag, Tags... rest) {
  return stream_key(mix64(seed ^ mix64(tag + 0x632be59bd9b4e019ull)), rest...);
}

// Maps a stream key to a uniform double in [0, 1) using the top 53 bits.
constexpr double key_to_unit(std::uint64_t key) {
  return static_cast<double>(key >> 11) * 0x1.0p-53;
}

// Keyed uniform phase draw; used for lazily generated channel tables.
template <typename... Tags>
inline Phase keyed_phase(std::uint64_t seed, Tags... tags) {
  return Phase(kTwoPi * key_to_unit(mix64(stream_key(seed, static_cast<std::uint64_t>(tags)...))));
}

// SplitMix64 as a UniformRandomBitGenerator: constant-cost seeding, one
// mix per draw. Plenty for Monte-Carlo work, and cheap enough to construct
// one per round.
class Rng {
 public:
  using result_type = std::uint64_t;
  explicit constexpr Rng(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }
  constexpr result_type operator()() {
    return splitmix_finalize(state_ += 0x9e3779b97f4a7c15ull);
  }

 private:
  std::uint64_t state_;
};

template <typename... Tags>
inline Rng stream_rng(std::uint64_t seed, Tags... tags) {
  return Rng(stream_key(seed, static_cast<std::uint64_t>(tags)...));
}

inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline Phase uniform_phase(Rng& rng) { return Phase(kTwoPi * uniform_unit(rng)); }

inline double gaussian(Rng& rng, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  return dist(rng);
}

// Circular complex Gaussian with the given per-component standard deviation.
inline std::complex<double> complex_gaussian(Rng& rng, double sigma_component) {
  std::normal_distribution<double> dist(0.0, sigma_component);
  double re = dist(rng);
  double im = dist(rng);
  return {re, im};
}

// Stream tag values; one per independent source of randomness.
namespace streams {
inline constexpr std::uint64_t kLinkPhase = 1;
inline constexpr std::uint64_t kInternalPhase = 2;
inline constexpr std::uint64_t kChainPhase = 3;
inline constexpr std::uint64_t kLosPhase = 4;
inline constexpr std::uint64_t kCycleNoise = 5;
inline constexpr std::uint64_t kLoopNoise = 6;
inline constexpr std::uint64_t kLoopInit = 7;
inline constexpr std::uint64_t kExchange = 8;
inline constexpr std::uint64_t kRound = 9;
inline constexpr std::uint64_t kSymbolNoise = 10;
inline constexpr std::uint64_t kCalibration = 11;
}  // namespace streams

}  // namespace phasekey
