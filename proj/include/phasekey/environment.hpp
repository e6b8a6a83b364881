// Simulated reciprocal wireless world: per-mirror-state channel phases,
// device-chain phase constants, optional LOS bias, AWGN, and pilot
// observation.
//
// All randomness is keyed off the realization seed, so tables are generated
// lazily on access and the realization is immutable and thread-safe.
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "phasekey/phase.hpp"
#include "phasekey/rng.hpp"

namespace phasekey {

struct Antenna {
  enum class Port : std::uint8_t { a, alpha, b, beta, eve };

  Port port = Port::a;
  int eve_index = 0;  // meaningful only when port == eve

  static constexpr Antenna a() { return {Port::a, 0}; }
  static constexpr Antenna alpha() { return {Port::alpha, 0}; }
  static constexpr Antenna b() { return {Port::b, 0}; }
  static constexpr Antenna beta() { return {Port::beta, 0}; }
  static constexpr Antenna eve(int k) { return {Port::eve, k}; }

  [[nodiscard]] bool is_eve() const { return port == Port::eve; }
  // Alice's unit carries the mirror structure; links touching it vary per state.
  [[nodiscard]] bool alice_side() const { return port == Port::a || port == Port::alpha; }
  [[nodiscard]] std::uint64_t key() const {
    return port == Port::eve ? 4 + static_cast<std::uint64_t>(eve_index)
                             : static_cast<std::uint64_t>(port);
  }
  friend bool operator==(const Antenna&, const Antenna&) = default;
};

const char* to_string(Antenna::Port port);

// Ordered endpoint pair. Reciprocity comes from keying channel draws on the
// unordered pair, so both directions see the identical phase.
struct LinkId {
  Antenna from;
  Antenna to;
  friend bool operator==(const LinkId&, const LinkId&) = default;
};

enum class LinkKind : std::uint8_t { over_air, internal_wired };

// Classifies a link or throws InvalidLinkError for unmodeled endpoint pairs.
LinkKind classify_link(const LinkId& link);

struct MirrorState {
  std::uint32_t index = 0;
  friend bool operator==(const MirrorState&, const MirrorState&) = default;
};

struct PilotSpec {
  int tone_count = 16;            // S
  std::vector<int> signs;         // +-1 per tone, known to both parties
  double snr_db = 0.0;            // +infinity disables noise exactly

  PilotSpec(int tones, std::vector<int> tone_signs, double snr);
  // All-(+1) pilot, the common case.
  static PilotSpec flat(int tones, double snr);
  [[nodiscard]] bool noiseless() const;
};

// Per-quadrature noise standard deviation such that the per-tone phase-error
// std at high SNR is 10^(-snr_db/20) radians for unit-amplitude pilots.
double phase_noise_sigma(double snr_db);

enum class ChainDirection : std::uint8_t { transmit, receive };

class ChannelRealization {
 public:
  // Draws a realization. K in [1, 30] (CapacityError above), n >= 0,
  // los_magnitude >= 0. internal_offset sets the constant alpha-a minus
  // b-beta difference exercised by four-antenna calibration; 0 models
  // already-calibrated hardware.
  static ChannelRealization draw(std::uint64_t seed, int mirror_count, int eve_antennas,
                                 double los_magnitude, double internal_offset = 0.0);

  // Raw reciprocal channel phase of an over-air link at a mirror state, or
  // the state-independent internal-wired phase. Excludes chains, LOS, noise.
  [[nodiscard]] Phase link_phase(const LinkId& link, MirrorState state) const;

  // State-independent wired phase between co-located antennas.
  [[nodiscard]] Phase internal_phase(const LinkId& link) const;

  // Constant phase a device's transmit or receive hardware path adds.
  [[nodiscard]] Phase chain_phase(Antenna device, ChainDirection dir) const;

  [[nodiscard]] std::complex<double> los_bias() const { return los_bias_; }
  [[nodiscard]] int mirror_count() const { return mirror_count_; }
  [[nodiscard]] std::uint32_t state_count() const { return 1u << mirror_count_; }
  [[nodiscard]] int eve_antennas() const { return eve_antennas_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }

 private:
  ChannelRealization() = default;
  void check_state(MirrorState state) const;
  std::uint64_t seed_ = 0;
  int mirror_count_ = 1;
  int eve_antennas_ = 0;
  std::complex<double> los_bias_{0.0, 0.0};
  Phase internal_alpha_a_;
  Phase internal_b_beta_;
};

// Noiseless ground-truth accessor for tests; never visible to protocol
// parties or Eve.
Phase oracle_link_phase(const ChannelRealization& env, const LinkId& link, MirrorState state);

// One pilot transmission over a link: per tone l,
//   sample_l = sign_l * exp(j(link + chain_tx + chain_rx + extra))
//              + los * 1{over-air} + noise_l.
// extra_phase carries protocol-injected phases and is 0 otherwise. The noise
// stream is caller-supplied so observations stay deterministic per call.
std::vector<std::complex<double>> observe_pilot(const ChannelRealization& env, const LinkId& link,
                                                MirrorState state, const PilotSpec& pilot,
                                                Phase extra_phase, Rng& noise);

// Receiver side of a pilot: undo the known signs, average coherently, take
// the phase. Throws DegenerateAverageError on a near-zero mean.
Phase received_pilot_phase(std::span<const std::complex<double>> samples, const PilotSpec& pilot);

}  // namespace phasekey
