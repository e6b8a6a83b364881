#include "phasekey/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "phasekey/protocol_four.hpp"
#include "phasekey/protocol_two.hpp"

namespace phasekey {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kLeakageBins = 16;

template <typename Fn>
void for_each_round(std::size_t rounds, Exec exec, Fn&& fn) {
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < static_cast<long long>(rounds); ++r) {
      fn(static_cast<std::size_t>(r));
    }
  } else {
    for (std::size_t r = 0; r < rounds; ++r) fn(r);
  }
}

// Serial maximum over a per-round value array; keeps reductions in one spot.
double max_of(const std::vector<double>& values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

double mean_of(const std::vector<double>& values) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
}

}  // namespace

std::vector<double> masked_phase_samples(std::uint64_t seed, std::size_t rounds, double fixed_x,
                                         Exec exec) {
  std::vector<double> out(rounds);
  const Phase x(fixed_x);
  for_each_round(rounds, exec, [&](std::size_t r) {
    Rng rng = stream_rng(seed, streams::kRound, r);
    out[r] = add(x, uniform_phase(rng)).radians();
  });
  return out;
}

CycleAgreementResult two_antenna_agreement(std::uint64_t seed, std::size_t rounds, int tones,
                                           Exec exec) {
  std::vector<double> pair_dist(rounds);
  std::vector<double> oracle_dist(rounds);
  const PilotSpec pilot = PilotSpec::flat(tones, kInf);
  for_each_round(rounds, exec, [&](std::size_t r) {
    auto env = ChannelRealization::draw(stream_key(seed, streams::kRound, r), 1, 0, 0.0);
    Rng noise = stream_rng(seed, streams::kCycleNoise, r);
    CycleResult cycle = run_cycle(env, MirrorState{0}, MirrorState{1}, pilot, noise);
    LinkId ab{Antenna::a(), Antenna::b()};
    Phase truth = sub(oracle_link_phase(env, ab, MirrorState{1}),
                      oracle_link_phase(env, ab, MirrorState{0}));
    pair_dist[r] = circular_distance(cycle.alice_shared, cycle.bob_shared);
    oracle_dist[r] = circular_distance(cycle.bob_shared, truth);
  });
  CycleAgreementResult res;
  res.max_pair_distance = max_of(pair_dist);
  res.max_oracle_distance = max_of(oracle_dist);
  res.rounds = rounds;
  return res;
}

LoopAgreementResult four_antenna_agreement(std::uint64_t seed, std::size_t rounds, int tones,
                                           Exec exec) {
  std::vector<double> pair_dist(rounds);
  std::vector<double> invariance(rounds);
  const PilotSpec pilot = PilotSpec::flat(tones, kInf);
  for_each_round(rounds, exec, [&](std::size_t r) {
    std::uint64_t env_seed = stream_key(seed, streams::kRound, r);
    Rng misc = stream_rng(seed, streams::kLoopInit, r);
    double offset = kTwoPi * uniform_unit(misc);
    auto env = ChannelRealization::draw(env_seed, 4, 0, 0.0, offset);
    const MirrorState key_state{1};

    FourAntennaSession session(env, pilot, env_seed);
    session.calibrate_internal_offset(1);
    LoopResult first = session.run_loops(key_state, uniform_phase(misc), uniform_phase(misc));

    FourAntennaSession repeat(env, pilot, env_seed);
    repeat.calibrate_internal_offset(1);
    LoopResult second = repeat.run_loops(key_state, uniform_phase(misc), uniform_phase(misc));

    pair_dist[r] = circular_distance(first.alice_shared, first.bob_shared);
    invariance[r] = std::max(circular_distance(first.alice_shared, second.alice_shared),
                             circular_distance(first.bob_shared, second.bob_shared));
  });
  LoopAgreementResult res;
  res.max_pair_distance = max_of(pair_dist);
  res.max_theta_invariance = max_of(invariance);
  res.rounds = rounds;
  return res;
}

PilotGainResult pilot_averaging_gain(std::uint64_t seed, std::size_t trials, double snr_db,
                                     int tones, Exec exec) {
  std::vector<double> err2_many(trials);
  std::vector<double> err2_one(trials);
  const PilotSpec pilot_many = PilotSpec::flat(tones, snr_db);
  const PilotSpec pilot_one = PilotSpec::flat(1, snr_db);
  for_each_round(trials, exec, [&](std::size_t r) {
    auto env = ChannelRealization::draw(stream_key(seed, streams::kRound, r), 1, 0, 0.0);
    LinkId ab{Antenna::a(), Antenna::b()};
    Phase truth = sub(oracle_link_phase(env, ab, MirrorState{1}),
                      oracle_link_phase(env, ab, MirrorState{0}));
    Rng noise_many = stream_rng(seed, streams::kCycleNoise, r, 0);
    CycleResult c_many = run_cycle(env, MirrorState{0}, MirrorState{1}, pilot_many, noise_many);
    Rng noise_one = stream_rng(seed, streams::kCycleNoise, r, 1);
    CycleResult c_one = run_cycle(env, MirrorState{0}, MirrorState{1}, pilot_one, noise_one);
    double e_many = signed_circular_difference(c_many.bob_shared, truth);
    double e_one = signed_circular_difference(c_one.bob_shared, truth);
    err2_many[r] = e_many * e_many;
    err2_one[r] = e_one * e_one;
  });
  PilotGainResult res;
  res.variance_many_tones = mean_of(err2_many);
  res.variance_one_tone = mean_of(err2_one);
  res.ratio = res.variance_many_tones / res.variance_one_tone;
  res.trials = trials;
  return res;
}

namespace {

// The ten observables Eve can form per antenna from her four recorded
// phases: each observation and each pairwise difference.
constexpr std::array<std::pair<int, int>, 6> kPairIndices{
    {{1, 0}, {2, 0}, {3, 0}, {2, 1}, {3, 1}, {3, 2}}};

std::array<double, 10> eve_variables(const EveAntennaRecord& rec) {
  std::array<double, 10> v{};
  for (int j = 0; j < 4; ++j) v[static_cast<std::size_t>(j)] = rec.observations[j].phase.radians();
  for (std::size_t p = 0; p < kPairIndices.size(); ++p) {
    auto [hi, lo] = kPairIndices[p];
    v[4 + p] = sub(rec.observations[hi].phase, rec.observations[lo].phase).radians();
  }
  return v;
}

std::string variable_name(ProtocolKind protocol, int antenna, std::size_t var) {
  static constexpr std::array<const char*, 4> two_obs{"ae_ref", "ae_i", "be_1", "be_2"};
  static constexpr std::array<const char*, 4> four_obs{"m_alpha", "m_beta", "m_b", "m_a"};
  const auto& obs = protocol == ProtocolKind::two_antenna ? two_obs : four_obs;
  std::string base = "eve" + std::to_string(antenna + 1) + ".";
  if (var < 4) return base + obs[var];
  auto [hi, lo] = kPairIndices[var - 4];
  return base + "d(" + obs[static_cast<std::size_t>(hi)] + "," +
         obs[static_cast<std::size_t>(lo)] + ")";
}

}  // namespace

LeakageResult eavesdropper_leakage(ProtocolKind protocol, std::uint64_t seed, std::size_t rounds,
                                   int eve_antennas, Exec exec) {
  if (rounds < static_cast<std::size_t>(10 * kLeakageBins * kLeakageBins)) {
    throw std::invalid_argument("eavesdropper_leakage: undersampled for 16x16 MI bins");
  }
  const PilotSpec pilot = PilotSpec::flat(1, kInf);
  const std::size_t n_vars = static_cast<std::size_t>(eve_antennas) * 10;
  const BinRange range = phase_bin_range();

  auto make_hists = [&] {
    return std::vector<JointHistogram>(
        n_vars, JointHistogram(kLeakageBins, kLeakageBins, range, range));
  };

  auto run_round = [&](std::size_t r, std::vector<JointHistogram>& hists) {
    auto env = ChannelRealization::draw(stream_key(seed, streams::kRound, r), 1, eve_antennas,
                                        0.0);
    Rng noise = stream_rng(seed, streams::kCycleNoise, r);
    double shared = 0.0;
    EveObservationSet obs;
    if (protocol == ProtocolKind::two_antenna) {
      CycleResult cycle = run_cycle(env, MirrorState{0}, MirrorState{1}, pilot, noise);
      shared = cycle.bob_shared.radians();
      obs = record_cycle(env, cycle, pilot);
    } else {
      FourAntennaSession session(env, pilot, stream_key(seed, streams::kRound, r, 1));
      LoopResult loops = session.run_loops(MirrorState{1});
      shared = loops.alice_shared.radians();
      obs = record_cycle(env, loops, pilot);
    }
    for (int k = 0; k < eve_antennas; ++k) {
      auto vars = eve_variables(obs.per_antenna[static_cast<std::size_t>(k)]);
      for (std::size_t j = 0; j < vars.size(); ++j) {
        hists[static_cast<std::size_t>(k) * 10 + j].add(vars[j], shared);
      }
    }
  };

  std::vector<JointHistogram> total = make_hists();
  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel
    {
      std::vector<JointHistogram> local = make_hists();
#pragma omp for schedule(static)
      for (long long r = 0; r < static_cast<long long>(rounds); ++r) {
        run_round(static_cast<std::size_t>(r), local);
      }
#pragma omp critical
      {
        for (std::size_t j = 0; j < total.size(); ++j) total[j].merge(local[j]);
      }
    }
#else
    for (std::size_t r = 0; r < rounds; ++r) run_round(r, total);
#endif
  } else {
    for (std::size_t r = 0; r < rounds; ++r) run_round(r, total);
  }

  LeakageResult res;
  res.rounds = rounds;
  res.variables.reserve(n_vars);
  for (int k = 0; k < eve_antennas; ++k) {
    for (std::size_t j = 0; j < 10; ++j) {
      LeakageVariable var;
      var.name = variable_name(protocol, k, j);
      var.mi = total[static_cast<std::size_t>(k) * 10 + j].estimate();
      res.max_mi_bits = std::max(res.max_mi_bits, var.mi.bits);
      res.variables.push_back(std::move(var));
    }
  }
  return res;
}

MaskedSymbolResult masked_symbol_secrecy(std::uint64_t seed, std::size_t symbols,
                                         int bits_per_symbol, Exec exec) {
  const int m = bits_per_symbol;
  const unsigned points = 1u << m;
  std::vector<std::uint8_t> bit_errors(symbols * static_cast<std::size_t>(m));
  std::vector<double> sym_index(symbols);
  std::vector<double> masked_value(symbols);
  for_each_round(symbols, exec, [&](std::size_t r) {
    Rng rng = stream_rng(seed, streams::kRound, r);
    unsigned idx = static_cast<unsigned>(rng() % points);
    unsigned word = idx ^ (idx >> 1);  // Gray codeword carried by the symbol
    Phase x(kTwoPi * idx / points);
    Phase y = mask(x, uniform_phase(rng));
    sym_index[r] = static_cast<double>(idx);
    masked_value[r] = y.radians();
    std::array<Phase, 1> one{y};
    auto decided = eve_demodulate(std::span<const Phase>(one), m);
    for (int j = 0; j < m; ++j) {
      std::uint8_t truth = static_cast<std::uint8_t>((word >> (m - 1 - j)) & 1u);
      bit_errors[r * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)] =
          decided[static_cast<std::size_t>(j)] != truth;
    }
  });
  std::size_t errors = 0;
  for (std::uint8_t e : bit_errors) errors += e;
  MaskedSymbolResult res;
  res.symbols = symbols;
  res.eve_ber = static_cast<double>(errors) / static_cast<double>(bit_errors.size());
  res.symbol_mi = estimate_mi_binned(sym_index, masked_value, static_cast<int>(points),
                                     kLeakageBins, BinRange{0.0, static_cast<double>(points)},
                                     phase_bin_range());
  return res;
}

namespace {

struct ExchangeCounts {
  std::uint32_t agreed = 0;
  std::uint32_t slave_bit_errors = 0;
  std::uint32_t eve_bit_errors = 0;
};

ExchangeAggregate aggregate_counts(const std::vector<ExchangeCounts>& counts, int info_bits) {
  ExchangeAggregate agg;
  agg.rounds = counts.size();
  std::uint64_t agreed = 0;
  std::uint64_t slave_err = 0;
  std::uint64_t eve_err = 0;
  for (const auto& c : counts) {
    agreed += c.agreed;
    slave_err += c.slave_bit_errors;
    eve_err += c.eve_bit_errors;
  }
  const double total_bits = static_cast<double>(agg.rounds) * info_bits;
  agg.agreement_rate = static_cast<double>(agreed) / static_cast<double>(agg.rounds);
  agg.slave_info_ber = static_cast<double>(slave_err) / total_bits;
  agg.eve_info_ber = static_cast<double>(eve_err) / total_bits;
  return agg;
}

std::uint32_t hamming(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  std::uint32_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

}  // namespace

ExchangeAggregate exchange_synthetic(std::uint64_t seed, std::size_t rounds,
                                     const KeyExchangeParams& params, double disagreement_std,
                                     double symbol_noise_std, Exec exec) {
  params.validate();
  std::vector<ExchangeCounts> counts(rounds);
  for_each_round(rounds, exec, [&](std::size_t r) {
    Rng rng = stream_rng(seed, streams::kExchange, r);
    const std::size_t n_p = static_cast<std::size_t>(params.symbol_count);
    std::vector<Phase> master(n_p);
    std::vector<Phase> slave(n_p);
    for (std::size_t t = 0; t < n_p; ++t) {
      master[t] = uniform_phase(rng);
      slave[t] = disagreement_std > 0.0
                     ? wrap(master[t].radians() + gaussian(rng, disagreement_std))
                     : master[t];
    }
    KeyOutcome outcome = exchange_key(params, master, slave, symbol_noise_std, rng);
    counts[r].agreed = outcome.agreed ? 1 : 0;
    counts[r].slave_bit_errors = hamming(outcome.slave_bits, outcome.master_bits);
    counts[r].eve_bit_errors = hamming(outcome.eve_bits, outcome.master_bits);
  });
  return aggregate_counts(counts, params.info_bits);
}

ExchangeAggregate exchange_over_protocol(ProtocolKind protocol, std::uint64_t seed,
                                         std::size_t rounds, const KeyExchangeParams& params,
                                         int tones, double snr_db, Exec exec) {
  params.validate();
  const PilotSpec pilot = PilotSpec::flat(tones, snr_db);
  const double symbol_noise = phase_noise_sigma(snr_db);
  std::vector<ExchangeCounts> counts(rounds);
  for_each_round(rounds, exec, [&](std::size_t r) {
    const std::size_t n_p = static_cast<std::size_t>(params.symbol_count);
    // Enough states for N_p key rounds plus calibration headroom.
    int mirrors = 1;
    while ((1u << mirrors) < n_p + 8) ++mirrors;
    std::uint64_t env_seed = stream_key(seed, streams::kRound, r);
    auto env = ChannelRealization::draw(env_seed, mirrors, 0, 0.0);
    std::vector<Phase> master;
    std::vector<Phase> slave;
    master.reserve(n_p);
    slave.reserve(n_p);
    if (protocol == ProtocolKind::two_antenna) {
      std::uint32_t state = 1;
      Rng noise = stream_rng(seed, streams::kCycleNoise, r);
      while (master.size() < n_p) {
        CycleResult c = run_cycle(env, MirrorState{0}, MirrorState{state++}, pilot, noise);
        if (c.erased) continue;
        master.push_back(c.bob_shared);  // Bob acts as the exchange master
        slave.push_back(c.alice_shared);
      }
    } else {
      FourAntennaSession session(env, pilot, env_seed);
      session.calibrate_internal_offset(1);
      std::uint32_t state = 1;
      while (master.size() < n_p) {
        LoopResult l = session.run_loops(MirrorState{state++});
        if (l.erased) continue;
        master.push_back(l.bob_shared);
        slave.push_back(l.alice_shared);
      }
    }
    Rng rng = stream_rng(seed, streams::kExchange, r);
    KeyOutcome outcome = exchange_key(params, master, slave, symbol_noise, rng);
    counts[r].agreed = outcome.agreed ? 1 : 0;
    counts[r].slave_bit_errors = hamming(outcome.slave_bits, outcome.master_bits);
    counts[r].eve_bit_errors = hamming(outcome.eve_bits, outcome.master_bits);
  });
  return aggregate_counts(counts, params.info_bits);
}

std::vector<double> shared_value_stream(ProtocolKind protocol, std::uint64_t seed,
                                        std::size_t count, int tones, double snr_db, Exec exec) {
  const PilotSpec pilot = PilotSpec::flat(tones, snr_db);
  int mirrors = 1;
  while ((1u << mirrors) < count + 2 && mirrors < 30) ++mirrors;
  auto env = ChannelRealization::draw(stream_key(seed, streams::kRound), mirrors, 0, 0.0);
  std::vector<double> values(count);
  if (protocol == ProtocolKind::two_antenna) {
    for_each_round(count, exec, [&](std::size_t r) {
      Rng noise = stream_rng(seed, streams::kCycleNoise, r);
      CycleResult c = run_cycle(env, MirrorState{0},
                                MirrorState{static_cast<std::uint32_t>(r + 1)}, pilot, noise);
      values[r] = c.bob_shared.radians();
    });
  } else {
    // Loops share no cross-state coupling, so per-state sessions keep the
    // kernel embarrassingly parallel; the offset is zero by construction.
    std::uint64_t session_seed = stream_key(seed, streams::kLoopNoise);
    for_each_round(count, exec, [&](std::size_t r) {
      FourAntennaSession session(env, pilot, session_seed);
      LoopResult l = session.run_loops(MirrorState{static_cast<std::uint32_t>(r + 1)});
      values[r] = l.alice_shared.radians();
    });
  }
  return values;
}

}  // namespace phasekey
