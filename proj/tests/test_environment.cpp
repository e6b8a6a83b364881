#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "phasekey/analysis.hpp"
#include "phasekey/environment.hpp"
#include "phasekey/errors.hpp"
#include "phasekey/rng.hpp"

using namespace phasekey;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("realizations are deterministic and reciprocal") {
  auto env1 = ChannelRealization::draw(7, 4, 2, 0.0);
  auto env2 = ChannelRealization::draw(7, 4, 2, 0.0);
  LinkId ab{Antenna::a(), Antenna::b()};
  LinkId ba{Antenna::b(), Antenna::a()};
  for (std::uint32_t i = 0; i < 16; ++i) {
    CHECK(env1.link_phase(ab, MirrorState{i}).radians() ==
          env2.link_phase(ab, MirrorState{i}).radians());
    CHECK(env1.link_phase(ab, MirrorState{i}).radians() ==
          env1.link_phase(ba, MirrorState{i}).radians());
  }
  CHECK(env1.chain_phase(Antenna::a(), ChainDirection::transmit).radians() ==
        env2.chain_phase(Antenna::a(), ChainDirection::transmit).radians());

  auto env3 = ChannelRealization::draw(8, 4, 2, 0.0);
  CHECK(env1.link_phase(ab, MirrorState{3}).radians() !=
        env3.link_phase(ab, MirrorState{3}).radians());
}

TEST_CASE("state dependence follows the mirror placement") {
  auto env = ChannelRealization::draw(11, 5, 2, 0.0);
  LinkId alpha_a{Antenna::alpha(), Antenna::a()};
  LinkId b_eve{Antenna::b(), Antenna::eve(0)};
  LinkId beta_eve{Antenna::beta(), Antenna::eve(1)};
  LinkId a_eve{Antenna::a(), Antenna::eve(0)};
  LinkId ab{Antenna::a(), Antenna::b()};

  // Internal wired and Bob-side-to-Eve links ignore the state.
  for (std::uint32_t i = 1; i < 32; ++i) {
    CHECK(env.link_phase(alpha_a, MirrorState{i}).radians() ==
          env.link_phase(alpha_a, MirrorState{0}).radians());
    CHECK(env.link_phase(b_eve, MirrorState{i}).radians() ==
          env.link_phase(b_eve, MirrorState{0}).radians());
    CHECK(env.link_phase(beta_eve, MirrorState{i}).radians() ==
          env.link_phase(beta_eve, MirrorState{0}).radians());
  }
  // Alice-side links vary.
  int distinct = 0;
  for (std::uint32_t i = 1; i < 32; ++i) {
    distinct += env.link_phase(a_eve, MirrorState{i}).radians() !=
                env.link_phase(a_eve, MirrorState{0}).radians();
    distinct += env.link_phase(ab, MirrorState{i}).radians() !=
                env.link_phase(ab, MirrorState{0}).radians();
  }
  CHECK(distinct == 62);
}

TEST_CASE("link validation and capacity limits") {
  auto env = ChannelRealization::draw(3, 2, 1, 0.0);
  CHECK_THROWS_AS((void)env.link_phase(LinkId{Antenna::alpha(), Antenna::beta()}, MirrorState{0}),
                  InvalidLinkError);
  CHECK_THROWS_AS((void)env.link_phase(LinkId{Antenna::a(), Antenna::a()}, MirrorState{0}),
                  InvalidLinkError);
  CHECK_THROWS_AS((void)env.link_phase(LinkId{Antenna::eve(0), Antenna::eve(1)}, MirrorState{0}),
                  InvalidLinkError);
  CHECK_THROWS_AS((void)env.link_phase(LinkId{Antenna::a(), Antenna::b()}, MirrorState{8}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ChannelRealization::draw(1, 31, 0, 0.0), CapacityError);
  CHECK_THROWS_AS(ChannelRealization::draw(1, 0, 0, 0.0), std::invalid_argument);
}

TEST_CASE("one link over the full state space stays uniform") {
  auto env = ChannelRealization::draw(2024, 10, 0, 0.0);
  LinkId ab{Antenna::a(), Antenna::b()};
  std::vector<Phase> phases;
  phases.reserve(1024);
  for (std::uint32_t i = 0; i < 1024; ++i) phases.push_back(env.link_phase(ab, MirrorState{i}));
  CHECK(kuiper_uniformity(std::span<const Phase>(phases), 0.01).pass);
}

TEST_CASE("per-state phases are uniform and uncorrelated") {
  auto env = ChannelRealization::draw(1234, 14, 0, 0.0);
  LinkId ab{Antenna::a(), Antenna::b()};
  const std::size_t m = 10000;
  std::vector<Phase> phases;
  phases.reserve(m);
  for (std::uint32_t i = 0; i < m; ++i) phases.push_back(env.link_phase(ab, MirrorState{i}));
  CHECK(kuiper_uniformity(std::span<const Phase>(phases), 0.01).pass);

  // Correlation between state i and state i^1 as unit complex numbers.
  std::complex<double> acc{0.0, 0.0};
  for (std::uint32_t i = 0; i < m; ++i) {
    double d = phases[i].radians() - phases[i ^ 1u].radians();
    acc += std::polar(1.0, d);
  }
  CHECK(std::abs(acc) / static_cast<double>(m) < 3.0 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("noiseless pilots carry the exact composite phase") {
  auto env = ChannelRealization::draw(5, 3, 1, 0.0);
  LinkId ab{Antenna::a(), Antenna::b()};
  MirrorState s{2};
  PilotSpec pilot = PilotSpec::flat(8, kInf);
  Rng noise = stream_rng(1);
  auto samples = observe_pilot(env, ab, s, pilot, Phase(), noise);
  REQUIRE(samples.size() == 8);
  Phase expected = add(add(env.link_phase(ab, s),
                           env.chain_phase(Antenna::a(), ChainDirection::transmit)),
                       env.chain_phase(Antenna::b(), ChainDirection::receive));
  for (const auto& smp : samples) {
    CHECK(circular_distance(wrap(std::arg(smp)), expected) < 1e-12);
  }

  // A -1 tone sign flips that sample's argument by pi.
  std::vector<int> signs(8, 1);
  signs[3] = -1;
  PilotSpec mixed(8, signs, kInf);
  auto flipped = observe_pilot(env, ab, s, mixed, Phase(), noise);
  CHECK(circular_distance(wrap(std::arg(flipped[3])), add(expected, Phase(kTwoPi / 2))) < 1e-12);
  // The receiver's sign correction restores the coherent average.
  CHECK(circular_distance(received_pilot_phase(flipped, mixed), expected) < 1e-12);

  // extra_phase rides along.
  auto shifted = observe_pilot(env, ab, s, pilot, Phase(1.0), noise);
  CHECK(circular_distance(wrap(std::arg(shifted[0])), add(expected, Phase(1.0))) < 1e-12);
}

TEST_CASE("oracle phases: reciprocity, wired invariance, Bob-to-Eve invariance") {
  auto env = ChannelRealization::draw(77, 6, 2, 0.0);
  LinkId ab{Antenna::a(), Antenna::b()};
  LinkId ba{Antenna::b(), Antenna::a()};
  LinkId alpha_a{Antenna::alpha(), Antenna::a()};
  LinkId b_e1{Antenna::b(), Antenna::eve(0)};
  for (std::uint32_t i = 0; i < 64; i += 7) {
    CHECK(oracle_link_phase(env, ab, MirrorState{i}).radians() ==
          oracle_link_phase(env, ba, MirrorState{i}).radians());
    CHECK(oracle_link_phase(env, alpha_a, MirrorState{i}).radians() ==
          oracle_link_phase(env, alpha_a, MirrorState{0}).radians());
    CHECK(oracle_link_phase(env, b_e1, MirrorState{i}).radians() ==
          oracle_link_phase(env, b_e1, MirrorState{0}).radians());
  }
}

TEST_CASE("noise level calibration: phase error std tracks 10^(-snr/20)") {
  auto env = ChannelRealization::draw(9, 1, 0, 0.0);
  LinkId ab{Antenna::a(), Antenna::b()};
  PilotSpec pilot = PilotSpec::flat(1, 20.0);
  Phase expected = add(add(env.link_phase(ab, MirrorState{0}),
                           env.chain_phase(Antenna::a(), ChainDirection::transmit)),
                       env.chain_phase(Antenna::b(), ChainDirection::receive));
  Rng noise = stream_rng(4242);
  double acc = 0.0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    auto samples = observe_pilot(env, ab, MirrorState{0}, pilot, Phase(), noise);
    double err = signed_circular_difference(wrap(std::arg(samples[0])), expected);
    acc += err * err;
  }
  double std_measured = std::sqrt(acc / trials);
  double predicted = std::pow(10.0, -20.0 / 20.0);
  CHECK(std_measured == doctest::Approx(predicted).epsilon(0.15));
}

TEST_CASE("pilot averaging cuts phase-error variance by about 1/S") {
  auto env = ChannelRealization::draw(10, 1, 0, 0.0);
  LinkId ab{Antenna::a(), Antenna::b()};
  PilotSpec p16 = PilotSpec::flat(16, 20.0);
  PilotSpec p1 = PilotSpec::flat(1, 20.0);
  Phase expected = add(add(env.link_phase(ab, MirrorState{0}),
                           env.chain_phase(Antenna::a(), ChainDirection::transmit)),
                       env.chain_phase(Antenna::b(), ChainDirection::receive));
  Rng noise = stream_rng(77);
  double var16 = 0.0;
  double var1 = 0.0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    auto s16 = observe_pilot(env, ab, MirrorState{0}, p16, Phase(), noise);
    auto s1 = observe_pilot(env, ab, MirrorState{0}, p1, Phase(), noise);
    double e16 = signed_circular_difference(received_pilot_phase(s16, p16), expected);
    double e1 = signed_circular_difference(received_pilot_phase(s1, p1), expected);
    var16 += e16 * e16;
    var1 += e1 * e1;
  }
  CHECK(var16 / var1 == doctest::Approx(1.0 / 16.0).epsilon(0.20));
}

TEST_CASE("LOS bias shifts over-air pilots only") {
  auto env = ChannelRealization::draw(6, 2, 0, 2.5);
  CHECK(std::abs(env.los_bias()) == doctest::Approx(2.5));
  Rng noise = stream_rng(2);
  PilotSpec pilot = PilotSpec::flat(4, kInf);
  auto air = observe_pilot(env, LinkId{Antenna::a(), Antenna::b()}, MirrorState{0}, pilot,
                           Phase(), noise);
  CHECK(std::abs(air[0]) != doctest::Approx(1.0));
  auto wired = observe_pilot(env, LinkId{Antenna::alpha(), Antenna::a()}, MirrorState{0}, pilot,
                             Phase(), noise);
  CHECK(std::abs(wired[0]) == doctest::Approx(1.0));
}

TEST_CASE("pilot spec validation") {
  CHECK_THROWS_AS(PilotSpec(0, {}, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(PilotSpec(2, {1, 2}, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(PilotSpec(2, {1}, 10.0), std::invalid_argument);
  CHECK(PilotSpec::flat(4, kInf).noiseless());
  CHECK_FALSE(PilotSpec::flat(4, 30.0).noiseless());
}
