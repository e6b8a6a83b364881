// Passive n-antenna eavesdropper: records every over-air transmission in
// both protocols, forms the under-determined modulo-2pi equation system, and
// attempts key/message recovery.
//
// Eve is granted noiseless observations throughout: secrecy claims are
// verified against the strongest passive adversary.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phasekey/environment.hpp"
#include "phasekey/protocol_four.hpp"
#include "phasekey/protocol_two.hpp"

namespace phasekey {

enum class ProtocolKind : std::uint8_t { two_antenna, four_antenna };

struct EveObservation {
  Phase phase;
  Antenna transmitter;
  MirrorState state;
  int transmission_index = 0;
};

struct EveAntennaRecord {
  std::array<EveObservation, 4> observations{};
  Phase receive_chain;  // Eve knows her own receiver hardware
};

struct EveObservationSet {
  ProtocolKind protocol = ProtocolKind::two_antenna;
  int antenna_count = 0;
  std::vector<EveAntennaRecord> per_antenna;
};

// Eve overhears one two-antenna cycle: per antenna, the four transmissions
// (a at i0, a at i, b twice). Each observation is the link phase at the
// transmission's state plus Eve's own receive-chain constant.
EveObservationSet record_cycle(const ChannelRealization& env, const CycleResult& cycle,
                               const PilotSpec& pilot);

// Eve overhears one four-antenna double loop: per antenna, items (i)-(iv),
// each carrying the accumulated injected phase of the overheard hop.
EveObservationSet record_cycle(const ChannelRealization& env, const LoopResult& loops,
                               const PilotSpec& pilot);

struct RecoveryAttempt {
  std::vector<Phase> posterior_samples;  // consistent alpha-b candidates
  Phase y1;                              // obs (ii) reduced by known constants
  Phase y2;                              // obs (iv) reduced by known constants
  std::string method_note;

  // Residual of the observed equations when the candidate is substituted
  // back (nuisance unknowns solved from the equations themselves).
  [[nodiscard]] double residual(Phase candidate) const;
  [[nodiscard]] bool consistent(Phase candidate, double tol = 1e-9) const;
};

// Eve's best effort on the four-antenna system: she knows the protocol and
// the internal constant alpha-a = b-beta, forms the two-equation system in
// three unknowns, and sweeps the free unknown over a uniform grid of size
// `trials` (including 0), solving for the rest. Every candidate satisfies
// her equations; the ambiguity is uniform over the circle.
RecoveryAttempt attempt_recovery_four(const EveObservationSet& obs, Phase known_internal,
                                      int trials, int antenna = 0);

// Eve's best strategy absent key knowledge: nearest-constellation-point
// decision on the masked phase (any fixed rotation guess is equivalent).
std::vector<std::uint8_t> eve_demodulate(std::span<const Phase> masked_symbols,
                                         int bits_per_symbol);
std::vector<std::uint8_t> eve_demodulate(std::span<const Phase> masked_symbols,
                                         const EveObservationSet& obs, int bits_per_symbol);

}  // namespace phasekey
