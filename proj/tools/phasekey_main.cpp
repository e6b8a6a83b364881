// phasekey CLI: runs one experiment per invocation.
//
//   phasekey <uniformity|leakage|exchange|sweep|replay> [--config path]
//            [--seed u64] [--out path]
//
// Exit codes: 0 all checks passed, 1 an acceptance check failed,
// 2 usage or configuration error.
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "phasekey/errors.hpp"
#include "phasekey/harness.hpp"

namespace {

const char* const kConfigKeys =
    "Config file keys (flat key=value lines, '#' comments):\n"
    "  kind              uniformity|leakage|exchange|sweep|replay (set by the subcommand)\n"
    "  seed              experiment seed (default 1)\n"
    "  k                 mirror count, states = 2^k (default 10)\n"
    "  n                 Eve antenna count (default 2)\n"
    "  s                 pilot tones per transmission (default 16)\n"
    "  snr_db            per-tone SNR in dB; 'inf' disables noise (default inf)\n"
    "  los_magnitude     constant line-of-sight bias magnitude (default 0)\n"
    "  m                 bits per PSK symbol (default 2)\n"
    "  l                 information bits per exchange (default 128)\n"
    "  r                 redundancy bits per exchange (default 128)\n"
    "  rounds            Monte-Carlo rounds (default 1000)\n"
    "  discard_fraction  replay low-energy discard fraction (default 0.20)\n"
    "  protocol          two|four (default two)\n"
    "  out               report CSV path (default report.csv)\n"
    "  trace             replay input CSV with header state,i,q\n"
    "  snr_list          comma-separated sweep SNRs (default 5,10,15,20,25)\n";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-reciprocity key-exchange simulator and verifier"};
  app.footer(kConfigKeys);
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_path;
  std::string trace_path;
  for (const char* name : {"uniformity", "leakage", "exchange", "sweep", "replay"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--seed", seed, "override the experiment seed")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--out", out_path, "override the report CSV path");
    if (std::string(name) == "replay") {
      sub->add_option("--trace", trace_path, "override the replay input trace path");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    phasekey::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = phasekey::ExperimentConfig::from_file(config_path);
    cfg.kind = app.get_subcommands().front()->get_name();
    if (seed_set) cfg.seed = seed;
    if (!out_path.empty()) cfg.out = out_path;
    if (!trace_path.empty()) cfg.trace = trace_path;
    return phasekey::run_experiment(cfg);
  } catch (const phasekey::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
