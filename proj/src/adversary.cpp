#include "phasekey/adversary.hpp"

#include <stdexcept>

#include "phasekey/errors.hpp"
#include "phasekey/keylink.hpp"

namespace phasekey {

namespace {

EveAntennaRecord make_record(const ChannelRealization& env, int k) {
  EveAntennaRecord rec;
  rec.receive_chain = env.chain_phase(Antenna::eve(k), ChainDirection::receive);
  return rec;
}

}  // namespace

EveObservationSet record_cycle(const ChannelRealization& env, const CycleResult& cycle,
                               const PilotSpec& pilot) {
  (void)pilot;  // Eve averages her tones too; noiseless averaging is exact
  EveObservationSet set;
  set.protocol = ProtocolKind::two_antenna;
  set.antenna_count = env.eve_antennas();
  set.per_antenna.reserve(static_cast<std::size_t>(set.antenna_count));
  for (int k = 0; k < set.antenna_count; ++k) {
    EveAntennaRecord rec = make_record(env, k);
    for (int t = 0; t < 4; ++t) {
      const Transmission& tx = cycle.transcript[static_cast<std::size_t>(t)];
      LinkId link{tx.transmitter, Antenna::eve(k)};
      Phase p = add(env.link_phase(link, tx.state), rec.receive_chain);
      rec.observations[static_cast<std::size_t>(t)] =
          EveObservation{p, tx.transmitter, tx.state, t};
    }
    set.per_antenna.push_back(rec);
  }
  return set;
}

EveObservationSet record_cycle(const ChannelRealization& env, const LoopResult& loops,
                               const PilotSpec& pilot) {
  (void)pilot;
  EveObservationSet set;
  set.protocol = ProtocolKind::four_antenna;
  set.antenna_count = env.eve_antennas();
  set.per_antenna.reserve(static_cast<std::size_t>(set.antenna_count));
  for (int k = 0; k < set.antenna_count; ++k) {
    EveAntennaRecord rec = make_record(env, k);
    for (int t = 0; t < 4; ++t) {
      const HopRecord& hop = loops.transcript[static_cast<std::size_t>(t)];
      LinkId link{hop.from, Antenna::eve(k)};
      Phase p = add(add(hop.injected, env.link_phase(link, hop.state)), rec.receive_chain);
      rec.observations[static_cast<std::size_t>(t)] = EveObservation{p, hop.from, hop.state, t};
    }
    set.per_antenna.push_back(rec);
  }
  return set;
}

double RecoveryAttempt::residual(Phase candidate) const {
  // Solve the nuisance unknowns from the equations, substitute back.
  Phase m2 = sub(y1, candidate);
  Phase m4 = sub(y2, candidate);
  double r1 = circular_distance(add(candidate, m2), y1);
  double r2 = circular_distance(add(candidate, m4), y2);
  return std::max(r1, r2);
}

bool RecoveryAttempt::consistent(Phase candidate, double tol) const {
  return residual(candidate) < tol;
}

RecoveryAttempt attempt_recovery_four(const EveObservationSet& obs, Phase known_internal,
                                      int trials, int antenna) {
  if (obs.protocol != ProtocolKind::four_antenna) {
    throw std::invalid_argument("attempt_recovery_four: needs a four-antenna observation set");
  }
  if (trials < 1) throw std::invalid_argument("attempt_recovery_four: trials must be >= 1");
  if (antenna < 0 || antenna >= obs.antenna_count) {
    throw std::invalid_argument("attempt_recovery_four: antenna index out of range");
  }
  const EveAntennaRecord& rec = obs.per_antenna[static_cast<std::size_t>(antenna)];
  // Observation (ii) = alpha-b + b-beta + beta-e + theta; Eve removes her own
  // receive chain and the known internal constant, leaving alpha-b + m2.
  Phase y1 = sub(sub(rec.observations[1].phase, rec.receive_chain), known_internal);
  // Observation (iv) = b-alpha + alpha-a + a-e + phi, likewise reduced.
  Phase y2 = sub(sub(rec.observations[3].phase, rec.receive_chain), known_internal);

  RecoveryAttempt attempt;
  attempt.y1 = y1;
  attempt.y2 = y2;
  attempt.method_note =
      "swept the free unknown m2 over a uniform grid; each grid value fixes "
      "alpha-b = y1 - m2 and m4 = y2 - alpha-b, all consistent";
  attempt.posterior_samples.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    Phase free_value(kTwoPi * static_cast<double>(t) / static_cast<double>(trials));
    attempt.posterior_samples.push_back(sub(y1, free_value));
  }
  return attempt;
}

std::vector<std::uint8_t> eve_demodulate(std::span<const Phase> masked_symbols,
                                         int bits_per_symbol) {
  return psk_demap(masked_symbols, bits_per_symbol);
}

std::vector<std::uint8_t> eve_demodulate(std::span<const Phase> masked_symbols,
                                         const EveObservationSet& obs, int bits_per_symbol) {
  (void)obs;  // her observations carry no information about the rotation
  return eve_demodulate(masked_symbols, bits_per_symbol);
}

}  // namespace phasekey
