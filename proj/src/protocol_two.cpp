#include "phasekey/protocol_two.hpp"

#include <unordered_set>

#include "phasekey/errors.hpp"

namespace phasekey {

CycleResult run_cycle(const ChannelRealization& env, MirrorState i0, MirrorState i,
                      const PilotSpec& pilot, Rng& noise) {
  if (i.index == i0.index) {
    throw StateReuseError("run_cycle: fresh state must differ from the reference state");
  }
  const LinkId a_to_b{Antenna::a(), Antenna::b()};
  const LinkId b_to_a{Antenna::b(), Antenna::a()};
  CycleResult res;
  res.reference_state = i0;
  res.fresh_state = i;
  res.transcript = {Transmission{Antenna::a(), i0}, Transmission{Antenna::a(), i},
                    Transmission{Antenna::b(), i0}, Transmission{Antenna::b(), i}};
  try {
    Phase ab_ref = received_pilot_phase(observe_pilot(env, a_to_b, i0, pilot, Phase(), noise), pilot);
    Phase ab_i = received_pilot_phase(observe_pilot(env, a_to_b, i, pilot, Phase(), noise), pilot);
    Phase ba_ref = received_pilot_phase(observe_pilot(env, b_to_a, i0, pilot, Phase(), noise), pilot);
    Phase ba_i = received_pilot_phase(observe_pilot(env, b_to_a, i, pilot, Phase(), noise), pilot);
    res.bob_shared = sub(ab_i, ab_ref);
    res.alice_shared = sub(ba_i, ba_ref);
  } catch (const DegenerateAverageError&) {
    res.erased = true;
  }
  return res;
}

SharedStream shared_phase_stream(const ChannelRealization& env,
                                 std::span<const MirrorState> states, const PilotSpec& pilot,
                                 std::uint64_t noise_seed, bool parallel) {
  const MirrorState reference{0};
  std::unordered_set<std::uint32_t> seen;
  seen.reserve(states.size());
  for (const MirrorState& s : states) {
    if (s.index == reference.index || !seen.insert(s.index).second) {
      throw StateReuseError("shared_phase_stream: states must be distinct and nonzero");
    }
  }
  std::vector<CycleResult> cycles(states.size());
  auto one = [&](std::size_t t) {
    Rng noise = stream_rng(noise_seed, streams::kCycleNoise, states[t].index);
    cycles[t] = run_cycle(env, reference, states[t], pilot, noise);
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long long t = 0; t < static_cast<long long>(states.size()); ++t) {
      one(static_cast<std::size_t>(t));
    }
  } else {
    for (std::size_t t = 0; t < states.size(); ++t) one(t);
  }
  SharedStream out;
  out.pairs.reserve(states.size());
  for (const CycleResult& c : cycles) {
    if (c.erased) {
      ++out.erasures;
      continue;
    }
    out.pairs.emplace_back(c.alice_shared, c.bob_shared);
  }
  return out;
}

}  // namespace phasekey
