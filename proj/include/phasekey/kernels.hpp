// Monte-Carlo kernels behind the experiments and the acceptance suite.
//
// Every kernel runs its rounds either serially or with OpenMP; per-round
// randomness is keyed by (seed, round), per-round outputs land in
// round-indexed slots, and cross-round accumulation is either integer counts
// or a fixed-order reduction, so both execution modes produce bit-identical
// results. The serial path is the reference the parallel path is tested
// against.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasekey/adversary.hpp"
#include "phasekey/analysis.hpp"
#include "phasekey/environment.hpp"
#include "phasekey/keylink.hpp"
#include "phasekey/phase.hpp"

namespace phasekey {

enum class Exec : std::uint8_t { serial, parallel };

// Masked phases add(x, Phi) for one fixed x over `rounds` uniform draws.
std::vector<double> masked_phase_samples(std::uint64_t seed, std::size_t rounds, double fixed_x,
                                         Exec exec);

// --- Reciprocity / agreement kernels -------------------------------------

struct CycleAgreementResult {
  double max_pair_distance = 0.0;    // max over rounds of d(alice, bob)
  double max_oracle_distance = 0.0;  // max over rounds of d(bob, oracle difference)
  std::size_t rounds = 0;
};

// Fresh realization per round (fresh random chain phases), one noiseless
// two-antenna cycle each, checked against the oracle channel difference.
CycleAgreementResult two_antenna_agreement(std::uint64_t seed, std::size_t rounds, int tones,
                                           Exec exec);

struct LoopAgreementResult {
  double max_pair_distance = 0.0;      // post-calibration d(alice, bob)
  double max_theta_invariance = 0.0;   // shared-value change under new theta/phi
  std::size_t rounds = 0;
};

// Fresh realization per round with a random nonzero internal offset, one
// calibrated noiseless double-loop each; each round is repeated with
// different theta/phi to bound the invariance residual.
LoopAgreementResult four_antenna_agreement(std::uint64_t seed, std::size_t rounds, int tones,
                                           Exec exec);

// --- Pilot averaging ------------------------------------------------------

struct PilotGainResult {
  double variance_many_tones = 0.0;  // per-node shared-value error variance, S = tones
  double variance_one_tone = 0.0;    // same with S = 1
  double ratio = 0.0;                // many / one
  std::size_t trials = 0;
};

PilotGainResult pilot_averaging_gain(std::uint64_t seed, std::size_t trials, double snr_db,
                                     int tones, Exec exec);

// --- Eavesdropper leakage -------------------------------------------------

struct LeakageVariable {
  std::string name;
  MIEstimate mi;
};

struct LeakageResult {
  std::vector<LeakageVariable> variables;  // every observation and pairwise difference
  double max_mi_bits = 0.0;
  std::size_t rounds = 0;
};

// MI between each Eve observation (and each pairwise difference) and the
// legitimate shared phase, over independent noiseless rounds with fresh
// realizations. 16x16 bins, Miller-Madow corrected.
LeakageResult eavesdropper_leakage(ProtocolKind protocol, std::uint64_t seed, std::size_t rounds,
                                   int eve_antennas, Exec exec);

// --- Masked-symbol secrecy ------------------------------------------------

struct MaskedSymbolResult {
  double eve_ber = 0.0;      // coded-bit BER of the nearest-point decision
  MIEstimate symbol_mi;      // MI(symbol index; masked phase)
  std::size_t symbols = 0;
};

MaskedSymbolResult masked_symbol_secrecy(std::uint64_t seed, std::size_t symbols,
                                         int bits_per_symbol, Exec exec);

// --- End-to-end exchanges -------------------------------------------------

struct ExchangeAggregate {
  double agreement_rate = 0.0;
  double slave_info_ber = 0.0;
  double eve_info_ber = 0.0;
  std::size_t rounds = 0;
};

// Synthetic phase streams: master phases fresh uniform per symbol, slave
// phases offset by wrapped Gaussian disagreement of the given std.
ExchangeAggregate exchange_synthetic(std::uint64_t seed, std::size_t rounds,
                                     const KeyExchangeParams& params, double disagreement_std,
                                     double symbol_noise_std, Exec exec);

// Full-pipeline exchanges: per round, the chosen protocol produces N_p
// shared-phase pairs at the given SNR (fresh realization per round), then a
// key exchange runs over them with symbol phase noise at the same SNR.
ExchangeAggregate exchange_over_protocol(ProtocolKind protocol, std::uint64_t seed,
                                         std::size_t rounds, const KeyExchangeParams& params,
                                         int tones, double snr_db, Exec exec);

// --- Shared-value stream (uniformity checks) ------------------------------

// Shared values (legitimate node's stream) over fresh states at the given
// SNR; protocol selectable. Values come back in state order.
std::vector<double> shared_value_stream(ProtocolKind protocol, std::uint64_t seed,
                                        std::size_t count, int tones, double snr_db, Exec exec);

}  // namespace phasekey
