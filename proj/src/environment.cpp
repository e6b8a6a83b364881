#include "phasekey/environment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "phasekey/errors.hpp"

namespace phasekey {

const char* to_string(Antenna::Port port) {
  switch (port) {
    case Antenna::Port::a: return "a";
    case Antenna::Port::alpha: return "alpha";
    case Antenna::Port::b: return "b";
    case Antenna::Port::beta: return "beta";
    case Antenna::Port::eve: return "eve";
  }
  return "?";
}

namespace {

bool is_internal_pair(const Antenna& u, const Antenna& v) {
  using P = Antenna::Port;
  auto pair_is = [&](P x, P y) {
    return (u.port == x && v.port == y) || (u.port == y && v.port == x);
  };
  return pair_is(P::alpha, P::a) || pair_is(P::b, P::beta);
}

bool is_over_air_pair(const Antenna& u, const Antenna& v) {
  using P = Antenna::Port;
  auto pair_is = [&](P x, P y) {
    return (u.port == x && v.port == y) || (u.port == y && v.port == x);
  };
  if (pair_is(P::a, P::b) || pair_is(P::alpha, P::b) || pair_is(P::beta, P::a)) return true;
  // Any legitimate antenna to an Eve antenna is over-air.
  if (u.is_eve() != v.is_eve()) return true;
  return false;
}

}  // namespace

LinkKind classify_link(const LinkId& link) {
  const Antenna& u = link.from;
  const Antenna& v = link.to;
  if (u == v) throw InvalidLinkError("link endpoints must differ");
  if (is_internal_pair(u, v)) return LinkKind::internal_wired;
  if (is_over_air_pair(u, v)) return LinkKind::over_air;
  throw InvalidLinkError("unmodeled link between these endpoints");
}

PilotSpec::PilotSpec(int tones, std::vector<int> tone_signs, double snr)
    : tone_count(tones), signs(std::move(tone_signs)), snr_db(snr) {
  if (tone_count < 1) throw std::invalid_argument("PilotSpec: tone_count must be >= 1");
  if (static_cast<int>(signs.size()) != tone_count) {
    throw std::invalid_argument("PilotSpec: |signs| must equal tone_count");
  }
  for (int s : signs) {
    if (s != 1 && s != -1) throw std::invalid_argument("PilotSpec: signs must be +-1");
  }
}

PilotSpec PilotSpec::flat(int tones, double snr) {
  return PilotSpec(tones, std::vector<int>(static_cast<std::size_t>(tones), 1), snr);
}

bool PilotSpec::noiseless() const { return std::isinf(snr_db) && snr_db > 0; }

double phase_noise_sigma(double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return std::pow(10.0, -snr_db / 20.0);
}

ChannelRealization ChannelRealization::draw(std::uint64_t seed, int mirror_count,
                                            int eve_antennas, double los_magnitude,
                                            double internal_offset) {
  if (mirror_count < 1) throw std::invalid_argument("draw_realization: K must be >= 1");
  if (mirror_count > 30) {
    throw CapacityError("draw_realization: K > 30 exceeds the indexable state space");
  }
  if (eve_antennas < 0) throw std::invalid_argument("draw_realization: n must be >= 0");
  if (!(los_magnitude >= 0.0)) {
    throw std::invalid_argument("draw_realization: los_magnitude must be >= 0");
  }
  ChannelRealization env;
  env.seed_ = seed;
  env.mirror_count_ = mirror_count;
  env.eve_antennas_ = eve_antennas;
  Phase los_phase = keyed_phase(seed, streams::kLosPhase);
  env.los_bias_ = los_magnitude * std::polar(1.0, los_phase.radians());
  env.internal_alpha_a_ = keyed_phase(seed, streams::kInternalPhase);
  env.internal_b_beta_ = sub(env.internal_alpha_a_, Phase(internal_offset));
  return env;
}

void ChannelRealization::check_state(MirrorState state) const {
  if (state.index >= state_count()) {
    throw std::invalid_argument("mirror state index out of range for 2^K states");
  }
}

Phase ChannelRealization::link_phase(const LinkId& link, MirrorState state) const {
  LinkKind kind = classify_link(link);
  if (kind == LinkKind::internal_wired) return internal_phase(link);
  check_state(state);
  std::uint64_t ka = link.from.key();
  std::uint64_t kb = link.to.key();
  if (ka > kb) std::swap(ka, kb);  // unordered pair: reciprocity by construction
  // Only links touching the mirror-equipped (Alice) side vary with the state.
  bool state_dependent = link.from.alice_side() || link.to.alice_side();
  std::uint64_t state_key = state_dependent ? state.index : 0xffffffffull;
  return keyed_phase(seed_, streams::kLinkPhase, ka, kb, state_key);
}

Phase ChannelRealization::internal_phase(const LinkId& link) const {
  if (classify_link(link) != LinkKind::internal_wired) {
    throw InvalidLinkError("internal_phase: not an internal-wired link");
  }
  return link.from.port == Antenna::Port::alpha || link.to.port == Antenna::Port::alpha
             ? internal_alpha_a_
             : internal_b_beta_;
}

Phase ChannelRealization::chain_phase(Antenna device, ChainDirection dir) const {
  if (device.is_eve() && device.eve_index >= eve_antennas_) {
    throw std::invalid_argument("chain_phase: eve antenna index out of range");
  }
  return keyed_phase(seed_, streams::kChainPhase, device.key(),
                     static_cast<std::uint64_t>(dir));
}

Phase oracle_link_phase(const ChannelRealization& env, const LinkId& link, MirrorState state) {
  return env.link_phase(link, state);
}

std::vector<std::complex<double>> observe_pilot(const ChannelRealization& env,
                                                const LinkId& link, MirrorState state,
                                                const PilotSpec& pilot, Phase extra_phase,
                                                Rng& noise) {
  LinkKind kind = classify_link(link);
  Phase base = env.link_phase(link, state);
  base = add(base, env.chain_phase(link.from, ChainDirection::transmit));
  base = add(base, env.chain_phase(link.to, ChainDirection::receive));
  base = add(base, extra_phase);
  const std::complex<double> carrier = std::polar(1.0, base.radians());
  const std::complex<double> los =
      kind == LinkKind::over_air ? env.los_bias() : std::complex<double>{0.0, 0.0};
  const double sigma = phase_noise_sigma(pilot.snr_db);
  std::vector<std::complex<double>> samples;
  samples.reserve(static_cast<std::size_t>(pilot.tone_count));
  for (int l = 0; l < pilot.tone_count; ++l) {
    std::complex<double> s = static_cast<double>(pilot.signs[l]) * carrier + los;
    if (sigma > 0.0) s += complex_gaussian(noise, sigma);
    samples.push_back(s);
  }
  return samples;
}

Phase received_pilot_phase(std::span<const std::complex<double>> samples,
                           const PilotSpec& pilot) {
  if (samples.size() != static_cast<std::size_t>(pilot.tone_count)) {
    throw std::invalid_argument("received_pilot_phase: sample count != tone count");
  }
  std::vector<std::complex<double>> corrected(samples.begin(), samples.end());
  for (int l = 0; l < pilot.tone_count; ++l) {
    corrected[static_cast<std::size_t>(l)] *= static_cast<double>(pilot.signs[l]);
  }
  return complex_mean_phase(corrected);
}

}  // namespace phasekey
