// Two-antenna key-sharing protocol: one four-transmission cycle per fresh
// mirror state yields one shared phase value at each legitimate node.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "phasekey/environment.hpp"
#include "phasekey/phase.hpp"

namespace phasekey {

struct Transmission {
  Antenna transmitter;
  MirrorState state;
};

struct CycleResult {
  Phase alice_shared;  // her estimate of ba^i - ba^i0
  Phase bob_shared;    // his estimate of ab^i - ab^i0
  bool erased = false;
  std::array<Transmission, 4> transcript{};  // Alice(i0), Alice(i), Bob(i0), Bob(i)
  MirrorState reference_state;
  MirrorState fresh_state;
};

// Runs one cycle: two Alice->Bob transmissions (states i0 then i), then two
// Bob->Alice transmissions (i0 then i). Chain phases cancel in each node's
// difference. Throws StateReuseError if i == i0. A degenerate pilot average
// flags the result as erased instead of throwing.
CycleResult run_cycle(const ChannelRealization& env, MirrorState i0, MirrorState i,
                      const PilotSpec& pilot, Rng& noise);

struct SharedStream {
  std::vector<std::pair<Phase, Phase>> pairs;  // (alice_shared, bob_shared)
  std::size_t erasures = 0;
};

// One cycle per state against the fixed reference i0 = 0. States must be
// distinct and nonzero (StateReuseError otherwise). Erased cycles are skipped,
// never retried, so no state transmits twice. Per-cycle noise streams derive
// from (noise_seed, state), making results independent of execution order.
SharedStream shared_phase_stream(const ChannelRealization& env,
                                 std::span<const MirrorState> states, const PilotSpec& pilot,
                                 std::uint64_t noise_seed, bool parallel = false);

}  // namespace phasekey
