// Experiment runner and I/O: configuration files, deterministic seeding,
// CSV report emission, and replay ingestion of measured I/Q traces.
#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "phasekey/phase.hpp"

namespace phasekey {

struct ExperimentConfig {
  std::string kind = "uniformity";  // uniformity | leakage | exchange | sweep | replay
  std::uint64_t seed = 1;
  int mirrors = 10;           // k
  int eve_antennas = 2;       // n
  int tones = 16;             // s
  double snr_db = std::numeric_limits<double>::infinity();
  double los_magnitude = 0.0;
  int bits_per_symbol = 2;    // m
  int info_bits = 128;        // l
  int redundancy_bits = 128;  // r
  int rounds = 1000;
  double discard_fraction = 0.20;
  std::string protocol = "two";  // two | four
  std::string out = "report.csv";
  std::string trace;             // replay input path
  std::vector<double> snr_list = {5.0, 10.0, 15.0, 20.0, 25.0};

  // Parses a flat key=value file ('#' comments, keys as listed in the
  // README). Unknown keys or malformed values raise ConfigError.
  static ExperimentConfig from_file(const std::string& path);
  void apply(const std::string& key, const std::string& value);
  void validate() const;  // ConfigError names the offending field
};

struct IQRecord {
  std::string state_label;
  std::complex<double> sample;
};

// Reads an I/Q trace CSV with header "state,i,q".
std::vector<IQRecord> load_iq_trace(const std::string& path);
std::vector<IQRecord> parse_iq_trace(std::istream& in, const std::string& origin);

// The measured-trace pipeline: subtract the empirical complex mean (LOS
// removal), stable-sort by magnitude, drop the lowest discard_fraction,
// return the survivors' phases. Requires at least 100 records.
std::vector<Phase> replay_ingest(std::span<const IQRecord> trace, double discard_fraction);

// Runs the configured experiment deterministically from the seed, writes the
// CSV report and a one-line summary to stdout. Returns 0 when every
// acceptance check in the experiment passed, 1 otherwise.
int run_experiment(const ExperimentConfig& config);

}  // namespace phasekey
