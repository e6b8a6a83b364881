#include "phasekey/protocol_four.hpp"

#include <stdexcept>
#include <vector>

#include "phasekey/errors.hpp"

namespace phasekey {

namespace {

// One over-air hop: the carried phase rides a unit pilot across the link and
// the receiver averages its tones. No per-port chain terms here; those are
// constants folded into the internal offsets (see header).
Phase hop_receive(const ChannelRealization& env, const LinkId& link, MirrorState state,
                  const PilotSpec& pilot, Phase carried, Rng& noise) {
  Phase ideal = add(carried, env.link_phase(link, state));
  if (pilot.noiseless() && std::abs(env.los_bias()) == 0.0) return ideal;
  const std::complex<double> carrier = std::polar(1.0, ideal.radians());
  const double sigma = phase_noise_sigma(pilot.snr_db);
  std::vector<std::complex<double>> samples;
  samples.reserve(static_cast<std::size_t>(pilot.tone_count));
  for (int l = 0; l < pilot.tone_count; ++l) {
    std::complex<double> s = static_cast<double>(pilot.signs[l]) * carrier + env.los_bias();
    if (sigma > 0.0) s += complex_gaussian(noise, sigma);
    samples.push_back(s);
  }
  return received_pilot_phase(samples, pilot);
}

}  // namespace

FourAntennaSession::FourAntennaSession(const ChannelRealization& env, PilotSpec pilot,
                                       std::uint64_t seed)
    : env_(env), pilot_(std::move(pilot)), seed_(seed) {}

void FourAntennaSession::spend_state(MirrorState i) {
  if (i.index >= env_.state_count()) {
    throw std::invalid_argument("run_loops: mirror state out of range");
  }
  if (!used_states_.insert(i.index).second) {
    throw StateReuseError("run_loops: state already spent in this session");
  }
}

LoopResult FourAntennaSession::run_loops_at(MirrorState i, Phase theta, Phase phi) {
  const LinkId alpha_b{Antenna::alpha(), Antenna::b()};
  const LinkId beta_a{Antenna::beta(), Antenna::a()};
  const LinkId b_alpha{Antenna::b(), Antenna::alpha()};
  const LinkId a_beta{Antenna::a(), Antenna::beta()};
  const Phase internal_ba = env_.internal_phase(LinkId{Antenna::b(), Antenna::beta()});
  const Phase internal_aa = env_.internal_phase(LinkId{Antenna::alpha(), Antenna::a()});

  Rng noise = stream_rng(seed_, streams::kLoopNoise, i.index);
  LoopResult res;
  res.state = i;
  res.theta = theta;
  res.phi = phi;
  try {
    // Loop 1: alpha -> b -> beta -> a, initiated by Alice with theta.
    Phase at_b = hop_receive(env_, alpha_b, i, pilot_, theta, noise);
    Phase from_beta = add(at_b, internal_ba);  // relay through Bob's front end
    Phase at_a = hop_receive(env_, beta_a, i, pilot_, from_beta, noise);
    res.alice_shared = sub(at_a, theta);

    // Loop 2: b -> alpha -> a -> beta, initiated by Bob with phi.
    Phase at_alpha = hop_receive(env_, b_alpha, i, pilot_, phi, noise);
    Phase from_a = add(at_alpha, internal_aa);
    Phase at_beta = hop_receive(env_, a_beta, i, pilot_, from_a, noise);
    Phase bob_raw = sub(at_beta, phi);
    res.bob_shared = sub(bob_raw, offset_);
    res.transcript = {HopRecord{Antenna::alpha(), Antenna::b(), i, theta},
                      HopRecord{Antenna::beta(), Antenna::a(), i, from_beta},
                      HopRecord{Antenna::b(), Antenna::alpha(), i, phi},
                      HopRecord{Antenna::a(), Antenna::beta(), i, from_a}};
  } catch (const DegenerateAverageError&) {
    res.erased = true;
  }
  return res;
}

LoopResult FourAntennaSession::run_loops(MirrorState i) {
  Rng init = stream_rng(seed_, streams::kLoopInit, i.index);
  Phase theta = uniform_phase(init);
  Phase phi = uniform_phase(init);
  return run_loops(i, theta, phi);
}

LoopResult FourAntennaSession::run_loops(MirrorState i, Phase theta, Phase phi) {
  spend_state(i);
  return run_loops_at(i, theta, phi);
}

Phase FourAntennaSession::calibrate_internal_offset(int calibration_rounds) {
  if (calibration_rounds < 1) {
    throw std::invalid_argument("calibrate_internal_offset: need at least one round");
  }
  // Reserved states at the top of the state space, never used for key material.
  std::vector<Phase> diffs;
  diffs.reserve(static_cast<std::size_t>(calibration_rounds));
  for (int t = 0; t < calibration_rounds; ++t) {
    MirrorState s{env_.state_count() - 1 - static_cast<std::uint32_t>(t)};
    spend_state(s);
    Rng init = stream_rng(seed_, streams::kCalibration, s.index);
    LoopResult r = run_loops_at(s, uniform_phase(init), uniform_phase(init));
    if (r.erased) continue;
    // Bob's raw value carries alpha-a where Alice's carries b-beta; their
    // difference is the constant offset alpha-a minus b-beta. Undo any
    // previously applied offset so recalibration stays correct.
    Phase bob_raw = add(r.bob_shared, offset_);
    diffs.push_back(sub(bob_raw, r.alice_shared));
  }
  if (diffs.empty()) {
    throw DegenerateAverageError("calibrate_internal_offset: every round erased");
  }
  offset_ = circular_mean(diffs);
  calibrated_ = true;
  return offset_;
}

}  // namespace phasekey
