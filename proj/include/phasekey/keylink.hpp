// Secure key/message transport: Gray-coded PSK mapping, modulo-2pi masking
// with shared channel phases, rate-1/2 convolutional FEC, and the
// end-to-end key exchange.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "phasekey/phase.hpp"
#include "phasekey/rng.hpp"

namespace phasekey {

struct KeyExchangeParams {
  int info_bits = 128;        // L
  int redundancy_bits = 128;  // r
  int bits_per_symbol = 2;    // m
  int symbol_count = 128;     // N_p

  // Enforces L + r = m * N_p, m >= 1, and positive counts.
  void validate() const;
};

struct KeyOutcome {
  std::vector<std::uint8_t> master_bits;  // L
  std::vector<std::uint8_t> slave_bits;   // L
  std::vector<std::uint8_t> eve_bits;     // L, best-effort decode
  bool agreed = false;
  int phases_consumed = 0;
};

// Gray-coded 2^m-PSK: each m-bit group (MSB first) is a Gray codeword whose
// decoded index g gives the constellation phase 2*pi*g/2^m.
// QPSK: 00 -> 0, 01 -> pi/2, 11 -> pi, 10 -> 3*pi/2.
std::vector<Phase> psk_map(std::span<const std::uint8_t> bits, int bits_per_symbol);

// Nearest-point decision followed by Gray encoding; inverse of psk_map.
std::vector<std::uint8_t> psk_demap(std::span<const Phase> symbols, int bits_per_symbol);

// Modulo-2pi one-time-pad in phase.
Phase mask(Phase x, Phase phi);
Phase unmask(Phase y, Phase phi);

// Rate-1/2 convolutional code, constraint length 7, generators (171, 133)
// octal, tail-biting: the encoder starts in the state given by the last six
// input bits, so L input bits yield exactly 2L coded bits. Needs L >= 6.
std::vector<std::uint8_t> fec_encode(std::span<const std::uint8_t> bits);

// Maximum-likelihood tail-biting Viterbi over all 64 start states, with soft
// branch metrics from the angular distance of each unmasked symbol to the
// constellation points. Input: 2L/m symbols; output: L bits.
std::vector<std::uint8_t> fec_decode(std::span<const Phase> unmasked_symbols,
                                     int bits_per_symbol);

// Hard-decision fallback: decode from 2L already-decided coded bits.
std::vector<std::uint8_t> fec_decode_hard(std::span<const std::uint8_t> coded_bits);

// Full master->slave exchange. Master draws L random bits, encodes, maps,
// and masks symbol t with master_phases[t]; transit adds wrapped Gaussian
// phase noise of std symbol_noise_std; the slave unmasks with its own phase
// estimates and soft-decodes. Eve sees the masked symbols unperturbed
// (worst case) and decodes without the key.
KeyOutcome exchange_key(const KeyExchangeParams& params, std::span<const Phase> master_phases,
                        std::span<const Phase> slave_phases, double symbol_noise_std, Rng& rng);

std::vector<std::uint8_t> random_bits(std::size_t count, Rng& rng);

}  // namespace phasekey
