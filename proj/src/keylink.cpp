#include "phasekey/keylink.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "phasekey/errors.hpp"

namespace phasekey {

namespace {

constexpr int kMemory = 6;  // constraint length 7
constexpr int kStates = 1 << kMemory;
constexpr unsigned kGen1 = 0171;  // octal, taps over the 7-bit window
constexpr unsigned kGen2 = 0133;

inline std::uint8_t parity7(unsigned v) {
  return static_cast<std::uint8_t>(std::popcount(v) & 1);
}

// Coded bit pair ((g1 << 1) | g2) emitted by the 7-bit window w = [u s5..s0].
inline int output_pair(unsigned w) {
  return (parity7(w & kGen1) << 1) | parity7(w & kGen2);
}

inline unsigned gray_encode(unsigned n) { return n ^ (n >> 1); }

inline unsigned gray_decode(unsigned g) {
  unsigned n = 0;
  for (; g != 0; g >>= 1) n ^= g;
  return n;
}

// Per-trellis-step costs for the four coded-bit pairs, from the received
// unmasked symbol phases. Squared angular distance approximates the
// log-likelihood under wrapped Gaussian phase noise.
std::vector<std::array<double, 4>> symbol_step_costs(std::span<const Phase> symbols,
                                                     int bits_per_symbol, std::size_t steps) {
  const int m = bits_per_symbol;
  const unsigned points = 1u << m;
  std::vector<double> point_phase(points);
  for (unsigned n = 0; n < points; ++n) point_phase[n] = kTwoPi * n / points;

  // Cost of each coded bit taking value v, via the nearest constellation
  // point whose Gray-coded bit at that position equals v (max-log per-bit
  // metric). For QPSK this is refined below to the exact pair metric.
  std::vector<std::array<double, 4>> costs(steps, {0.0, 0.0, 0.0, 0.0});
  if (m == 2) {
    for (std::size_t t = 0; t < steps; ++t) {
      for (int pair = 0; pair < 4; ++pair) {
        unsigned idx = gray_decode(static_cast<unsigned>(pair));
        double d = circular_distance(symbols[t], Phase(point_phase[idx]));
        costs[t][static_cast<std::size_t>(pair)] = d * d;
      }
    }
    return costs;
  }
  const std::size_t coded_bits = steps * 2;
  std::vector<std::array<double, 2>> bit_cost(coded_bits);
  for (std::size_t b = 0; b < coded_bits; ++b) {
    std::size_t sym = b / static_cast<std::size_t>(m);
    int pos = static_cast<int>(b % static_cast<std::size_t>(m));  // MSB first
    std::array<double, 2> best{std::numeric_limits<double>::infinity(),
                               std::numeric_limits<double>::infinity()};
    for (unsigned n = 0; n < points; ++n) {
      unsigned word = gray_encode(n);
      int v = (word >> (m - 1 - pos)) & 1u;
      double d = circular_distance(symbols[sym], Phase(point_phase[n]));
      best[static_cast<std::size_t>(v)] = std::min(best[static_cast<std::size_t>(v)], d * d);
    }
    bit_cost[b] = best;
  }
  for (std::size_t t = 0; t < steps; ++t) {
    for (int pair = 0; pair < 4; ++pair) {
      costs[t][static_cast<std::size_t>(pair)] =
          bit_cost[2 * t][static_cast<std::size_t>((pair >> 1) & 1)] +
          bit_cost[2 * t + 1][static_cast<std::size_t>(pair & 1)];
    }
  }
  return costs;
}

std::vector<std::array<double, 4>> hard_step_costs(std::span<const std::uint8_t> coded,
                                                   std::size_t steps) {
  std::vector<std::array<double, 4>> costs(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    int rx = ((coded[2 * t] != 0) << 1) | (coded[2 * t + 1] != 0);
    for (int pair = 0; pair < 4; ++pair) {
      int diff = rx ^ pair;
      costs[t][static_cast<std::size_t>(pair)] = ((diff >> 1) & 1) + (diff & 1);
    }
  }
  return costs;
}

// Maximum-likelihood tail-biting decode: one constrained Viterbi pass per
// start state (start == end), keep the best. Exact, and fast enough at the
// block lengths used here (64 * L * 64 * 2 adds-compares).
std::vector<std::uint8_t> viterbi_tail_biting(const std::vector<std::array<double, 4>>& costs) {
  const std::size_t steps = costs.size();
  const double inf = std::numeric_limits<double>::infinity();

  // Transition tables: for next-state ns and trailing bit s0 of the previous
  // state, the 7-bit window is w = (ns << 1) | s0, the predecessor is
  // w & 63, and the current info bit is ns >> 5.
  std::array<std::array<int, 2>, kStates> pair_of{};
  for (int ns = 0; ns < kStates; ++ns) {
    for (int s0 = 0; s0 < 2; ++s0) {
      pair_of[static_cast<std::size_t>(ns)][static_cast<std::size_t>(s0)] =
          output_pair(static_cast<unsigned>((ns << 1) | s0));
    }
  }

  double best_metric = inf;
  std::vector<std::uint64_t> best_decisions;
  int best_start = 0;

  std::vector<std::uint64_t> decisions(steps);
  std::array<double, kStates> metric{};
  std::array<double, kStates> next{};
  for (int start = 0; start < kStates; ++start) {
    metric.fill(inf);
    metric[static_cast<std::size_t>(start)] = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
      std::uint64_t dec = 0;
      const std::array<double, 4>& c = costs[t];
      for (int ns = 0; ns < kStates; ++ns) {
        const auto& pr = pair_of[static_cast<std::size_t>(ns)];
        double m0 = metric[static_cast<std::size_t>((ns << 1) & (kStates - 1))] +
                    c[static_cast<std::size_t>(pr[0])];
        double m1 = metric[static_cast<std::size_t>(((ns << 1) | 1) & (kStates - 1))] +
                    c[static_cast<std::size_t>(pr[1])];
        if (m1 < m0) {
          next[static_cast<std::size_t>(ns)] = m1;
          dec |= (1ull << ns);
        } else {
          next[static_cast<std::size_t>(ns)] = m0;
        }
      }
      decisions[t] = dec;
      metric = next;
    }
    double end_metric = metric[static_cast<std::size_t>(start)];
    if (end_metric < best_metric) {
      best_metric = end_metric;
      best_decisions = decisions;
      best_start = start;
    }
  }
  if (!std::isfinite(best_metric)) {
    throw FramingError("fec_decode: no surviving path");
  }
  std::vector<std::uint8_t> bits(steps);
  int state = best_start;
  for (std::size_t t = steps; t-- > 0;) {
    int s0 = static_cast<int>((best_decisions[t] >> state) & 1ull);
    bits[t] = static_cast<std::uint8_t>(state >> (kMemory - 1));
    state = ((state << 1) | s0) & (kStates - 1);
  }
  return bits;
}

}  // namespace

void KeyExchangeParams::validate() const {
  if (info_bits < 1 || redundancy_bits < 0 || bits_per_symbol < 1 || symbol_count < 1) {
    throw std::invalid_argument("KeyExchangeParams: counts must be positive");
  }
  if (info_bits + redundancy_bits != bits_per_symbol * symbol_count) {
    throw std::invalid_argument("KeyExchangeParams: L + r must equal m * N_p");
  }
}

std::vector<Phase> psk_map(std::span<const std::uint8_t> bits, int bits_per_symbol) {
  const int m = bits_per_symbol;
  if (m < 1 || m > 16) throw std::invalid_argument("psk_map: m must be in [1, 16]");
  if (bits.size() % static_cast<std::size_t>(m) != 0) {
    throw FramingError("psk_map: bit count not divisible by m");
  }
  const unsigned points = 1u << m;
  std::vector<Phase> symbols;
  symbols.reserve(bits.size() / static_cast<std::size_t>(m));
  for (std::size_t off = 0; off < bits.size(); off += static_cast<std::size_t>(m)) {
    unsigned word = 0;
    for (int j = 0; j < m; ++j) word = (word << 1) | (bits[off + static_cast<std::size_t>(j)] != 0);
    unsigned idx = gray_decode(word);
    symbols.push_back(Phase(kTwoPi * idx / points));
  }
  return symbols;
}

std::vector<std::uint8_t> psk_demap(std::span<const Phase> symbols, int bits_per_symbol) {
  const int m = bits_per_symbol;
  if (m < 1 || m > 16) throw std::invalid_argument("psk_demap: m must be in [1, 16]");
  const unsigned points = 1u << m;
  std::vector<std::uint8_t> bits;
  bits.reserve(symbols.size() * static_cast<std::size_t>(m));
  for (const Phase& y : symbols) {
    auto idx = static_cast<unsigned>(
                   std::llround(y.radians() * points / kTwoPi)) % points;
    unsigned word = gray_encode(idx);
    for (int j = m - 1; j >= 0; --j) bits.push_back(static_cast<std::uint8_t>((word >> j) & 1u));
  }
  return bits;
}

Phase mask(Phase x, Phase phi) { return add(x, phi); }

Phase unmask(Phase y, Phase phi) { return sub(y, phi); }

std::vector<std::uint8_t> fec_encode(std::span<const std::uint8_t> bits) {
  const std::size_t len = bits.size();
  if (len < static_cast<std::size_t>(kMemory)) {
    throw FramingError("fec_encode: need at least 6 input bits for tail-biting");
  }
  // Tail-biting initialization: state holds the last six input bits.
  unsigned state = 0;
  for (int j = 1; j <= kMemory; ++j) {
    state |= static_cast<unsigned>(bits[len - static_cast<std::size_t>(j)] != 0)
             << (kMemory - j);
  }
  std::vector<std::uint8_t> coded;
  coded.reserve(2 * len);
  for (std::size_t t = 0; t < len; ++t) {
    unsigned w = (static_cast<unsigned>(bits[t] != 0) << kMemory) | state;
    int pair = output_pair(w);
    coded.push_back(static_cast<std::uint8_t>((pair >> 1) & 1));
    coded.push_back(static_cast<std::uint8_t>(pair & 1));
    state = w >> 1;
  }
  return coded;
}

std::vector<std::uint8_t> fec_decode(std::span<const Phase> unmasked_symbols,
                                     int bits_per_symbol) {
  const int m = bits_per_symbol;
  if (m < 1 || m > 16) throw std::invalid_argument("fec_decode: m must be in [1, 16]");
  std::size_t coded_bits = unmasked_symbols.size() * static_cast<std::size_t>(m);
  if (coded_bits % 2 != 0 || coded_bits / 2 < static_cast<std::size_t>(kMemory)) {
    throw FramingError("fec_decode: symbol stream does not frame a rate-1/2 block");
  }
  return viterbi_tail_biting(symbol_step_costs(unmasked_symbols, m, coded_bits / 2));
}

std::vector<std::uint8_t> fec_decode_hard(std::span<const std::uint8_t> coded_bits) {
  if (coded_bits.size() % 2 != 0 || coded_bits.size() / 2 < static_cast<std::size_t>(kMemory)) {
    throw FramingError("fec_decode_hard: coded length does not frame a rate-1/2 block");
  }
  return viterbi_tail_biting(hard_step_costs(coded_bits, coded_bits.size() / 2));
}

std::vector<std::uint8_t> random_bits(std::size_t count, Rng& rng) {
  std::vector<std::uint8_t> bits(count);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1ull);
  return bits;
}

KeyOutcome exchange_key(const KeyExchangeParams& params, std::span<const Phase> master_phases,
                        std::span<const Phase> slave_phases, double symbol_noise_std, Rng& rng) {
  params.validate();
  if (params.redundancy_bits != params.info_bits) {
    throw FramingError("exchange_key: the rate-1/2 code requires r = L");
  }
  const std::size_t n_p = static_cast<std::size_t>(params.symbol_count);
  if (master_phases.size() != n_p || slave_phases.size() != n_p) {
    throw InsufficientKeyMaterialError("exchange_key: need exactly N_p phases per node");
  }
  KeyOutcome out;
  out.master_bits = random_bits(static_cast<std::size_t>(params.info_bits), rng);
  std::vector<std::uint8_t> coded = fec_encode(out.master_bits);
  std::vector<Phase> symbols = psk_map(coded, params.bits_per_symbol);

  std::vector<Phase> transmitted(n_p);
  std::vector<Phase> slave_view(n_p);
  for (std::size_t t = 0; t < n_p; ++t) {
    Phase y = mask(symbols[t], master_phases[t]);
    transmitted[t] = y;  // Eve's copy: no receiver noise, worst case
    if (symbol_noise_std > 0.0) y = wrap(y.radians() + gaussian(rng, symbol_noise_std));
    slave_view[t] = unmask(y, slave_phases[t]);
  }
  out.slave_bits = fec_decode(slave_view, params.bits_per_symbol);
  // Eve soft-decodes the masked stream directly; no rotation guess helps her.
  out.eve_bits = fec_decode(transmitted, params.bits_per_symbol);
  out.agreed = out.slave_bits == out.master_bits;
  out.phases_consumed = params.symbol_count;
  return out;
}

}  // namespace phasekey
