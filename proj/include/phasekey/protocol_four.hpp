// Four-antenna loop protocol: per mirror state, two traversing loops (one
// initiated by each node) produce one shared phase at each node without
// inter-node time/frequency synchronization.
//
// Hops are modeled as phase-accumulation relays: the forwarding node
// re-transmits a unit-amplitude pilot carrying the accumulated phase, and
// each over-air reception adds its own pilot noise. Per-port hardware chain
// constants are folded into the internal wired constants: every
// unit-constant phase shift lands in the single offset that calibration
// removes.
#pragma once

#include <array>
#include <cstdint>
#include <unordered_set>

#include "phasekey/environment.hpp"
#include "phasekey/phase.hpp"

namespace phasekey {

struct HopRecord {
  Antenna from;
  Antenna to;
  MirrorState state;
  Phase injected;  // phase carried by the transmitted pilot, before this hop's link
};

struct LoopResult {
  Phase alice_shared;  // alpha-b + b-beta + beta-a, after loop 1
  Phase bob_shared;    // loop-2 value, corrected by the session's calibration offset
  Phase theta;         // Alice's loop-initiation random phase
  Phase phi;           // Bob's loop-initiation random phase
  bool erased = false;
  std::array<HopRecord, 4> transcript{};  // alpha->b, beta->a, b->alpha, a->beta
  MirrorState state;
};

// One key-sharing session: tracks which states have been spent (each state
// carries key material at most once) and the calibration offset applied to
// Bob's values.
class FourAntennaSession {
 public:
  FourAntennaSession(const ChannelRealization& env, PilotSpec pilot, std::uint64_t seed);

  // Estimates the constant internal offset alpha-a minus b-beta from loop
  // pairs run at reserved states taken from the top of the state space, then
  // applies it to all subsequent bob_shared values. Returns the estimate.
  Phase calibrate_internal_offset(int calibration_rounds);

  // Runs both traversing loops at state i, drawing fresh theta/phi from the
  // session's per-state stream. Throws StateReuseError if i was spent.
  LoopResult run_loops(MirrorState i);

  // Same, with caller-chosen loop-initiation phases (invariance tests).
  LoopResult run_loops(MirrorState i, Phase theta, Phase phi);

  [[nodiscard]] Phase internal_offset() const { return offset_; }
  [[nodiscard]] bool calibrated() const { return calibrated_; }

 private:
  LoopResult run_loops_at(MirrorState i, Phase theta, Phase phi);
  void spend_state(MirrorState i);

  const ChannelRealization& env_;
  PilotSpec pilot_;
  std::uint64_t seed_;
  Phase offset_;  // applied estimate; zero until calibrated
  bool calibrated_ = false;
  std::unordered_set<std::uint32_t> used_states_;
};

}  // namespace phasekey
