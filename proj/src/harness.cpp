#include "phasekey/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "phasekey/adversary.hpp"
#include "phasekey/analysis.hpp"
#include "phasekey/errors.hpp"
#include "phasekey/kernels.hpp"
#include "phasekey/rng.hpp"

namespace phasekey {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  if (value == "inf" || value == "+inf" || value == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "not a number: '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "not an integer: '" + value + "'");
  }
}

// Fixed-width float formatting keeps reports byte-identical across reruns.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class CsvReport {
 public:
  CsvReport(const std::string& path, std::span<const std::string> header) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open report file: " + path);
    write_row(header);
  }
  void write_row(std::span<const std::string> cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("failed writing report file: " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

ProtocolKind protocol_of(const ExperimentConfig& cfg) {
  return cfg.protocol == "four" ? ProtocolKind::four_antenna : ProtocolKind::two_antenna;
}

constexpr double kSignificance = 0.01;
constexpr double kLeakageThresholdBits = 0.02;

int run_uniformity(const ExperimentConfig& cfg) {
  const std::array<std::pair<const char*, double>, 4> fixed_xs{
      {{"mask_x_0", 0.0}, {"mask_x_pi4", kTwoPi / 8.0}, {"mask_x_1", 1.0}, {"mask_x_3", 3.0}}};
  std::vector<std::string> header{"variable", "n", "kuiper_v", "modified_statistic",
                                  "critical_value", "pass"};
  CsvReport report(cfg.out, header);
  bool all_pass = true;
  auto emit = [&](const std::string& name, const UniformityReport& rep) {
    all_pass = all_pass && rep.pass;
    report.write_row(std::array<std::string, 6>{
        name, std::to_string(rep.n), fmt(rep.statistic), fmt(rep.modified_statistic),
        fmt(rep.critical_value), rep.pass ? "true" : "false"});
  };
  for (std::size_t i = 0; i < fixed_xs.size(); ++i) {
    auto [name, x] = fixed_xs[i];
    auto samples =
        masked_phase_samples(stream_key(cfg.seed, 1, i), cfg.rounds, x, Exec::parallel);
    emit(name, kuiper_uniformity(std::span<const double>(samples), kSignificance));
  }
  auto stream = shared_value_stream(protocol_of(cfg), stream_key(cfg.seed, 2),
                                    static_cast<std::size_t>(cfg.rounds), cfg.tones, cfg.snr_db,
                                    Exec::parallel);
  emit("shared_stream_" + cfg.protocol,
       kuiper_uniformity(std::span<const double>(stream), kSignificance));
  report.close();
  std::cout << "uniformity: " << (all_pass ? "pass" : "FAIL") << " (" << (4 + 1)
            << " variables, rounds=" << cfg.rounds << ")\n";
  return all_pass ? 0 : 1;
}

int run_leakage(const ExperimentConfig& cfg) {
  LeakageResult res = eavesdropper_leakage(protocol_of(cfg), cfg.seed,
                                           static_cast<std::size_t>(cfg.rounds),
                                           cfg.eve_antennas, Exec::parallel);
  std::vector<std::string> header{"protocol", "variable", "n", "mi_bits", "plugin_bits",
                                  "threshold_bits", "pass"};
  CsvReport report(cfg.out, header);
  bool all_pass = true;
  for (const LeakageVariable& v : res.variables) {
    bool pass = v.mi.bits <= kLeakageThresholdBits;
    all_pass = all_pass && pass;
    report.write_row(std::array<std::string, 7>{cfg.protocol, v.name, std::to_string(v.mi.n),
                                                fmt(v.mi.bits), fmt(v.mi.plugin_bits),
                                                fmt(kLeakageThresholdBits),
                                                pass ? "true" : "false"});
  }
  report.close();
  std::cout << "leakage: " << (all_pass ? "pass" : "FAIL")
            << " (max MI = " << fmt(res.max_mi_bits) << " bits over "
            << res.variables.size() << " variables, rounds=" << cfg.rounds << ")\n";
  return all_pass ? 0 : 1;
}

KeyExchangeParams params_of(const ExperimentConfig& cfg) {
  KeyExchangeParams p;
  p.info_bits = cfg.info_bits;
  p.redundancy_bits = cfg.redundancy_bits;
  p.bits_per_symbol = cfg.bits_per_symbol;
  p.symbol_count = (cfg.info_bits + cfg.redundancy_bits) / cfg.bits_per_symbol;
  return p;
}

int run_exchange(const ExperimentConfig& cfg) {
  ExchangeAggregate agg = exchange_over_protocol(protocol_of(cfg), cfg.seed,
                                                 static_cast<std::size_t>(cfg.rounds),
                                                 params_of(cfg), cfg.tones, cfg.snr_db,
                                                 Exec::parallel);
  // The checkable claims: Eve stays at coin-flip BER, and a noiseless link
  // agrees every time. Noisy agreement is reported, not bounded.
  bool eve_ok = std::fabs(agg.eve_info_ber - 0.5) <= 0.01;
  bool noiseless_ok = !std::isinf(cfg.snr_db) || agg.agreement_rate == 1.0;
  bool all_pass = eve_ok && noiseless_ok;
  std::vector<std::string> header{"protocol", "rounds", "snr_db", "agreement_rate",
                                  "slave_info_ber", "eve_info_ber", "pass"};
  CsvReport report(cfg.out, header);
  report.write_row(std::array<std::string, 7>{
      cfg.protocol, std::to_string(agg.rounds), fmt(cfg.snr_db), fmt(agg.agreement_rate),
      fmt(agg.slave_info_ber), fmt(agg.eve_info_ber), all_pass ? "true" : "false"});
  report.close();
  std::cout << "exchange: " << (all_pass ? "pass" : "FAIL")
            << " (agreement=" << fmt(agg.agreement_rate)
            << ", eve_ber=" << fmt(agg.eve_info_ber) << ", rounds=" << cfg.rounds << ")\n";
  return all_pass ? 0 : 1;
}

int run_sweep(const ExperimentConfig& cfg) {
  std::vector<std::string> header{"snr_db", "rounds", "agreement_rate", "slave_info_ber",
                                  "eve_info_ber"};
  CsvReport report(cfg.out, header);
  double prev_rate = -1.0;
  bool nondecreasing = true;
  bool eve_ok = true;
  for (std::size_t i = 0; i < cfg.snr_list.size(); ++i) {
    double snr = cfg.snr_list[i];
    ExchangeAggregate agg = exchange_over_protocol(protocol_of(cfg),
                                                   stream_key(cfg.seed, i),
                                                   static_cast<std::size_t>(cfg.rounds),
                                                   params_of(cfg), cfg.tones, snr,
                                                   Exec::parallel);
    nondecreasing = nondecreasing && agg.agreement_rate >= prev_rate;
    eve_ok = eve_ok && std::fabs(agg.eve_info_ber - 0.5) <= 0.02;
    prev_rate = agg.agreement_rate;
    report.write_row(std::array<std::string, 5>{fmt(snr), std::to_string(agg.rounds),
                                                fmt(agg.agreement_rate),
                                                fmt(agg.slave_info_ber),
                                                fmt(agg.eve_info_ber)});
  }
  report.close();
  bool all_pass = nondecreasing && eve_ok;
  std::cout << "sweep: " << (all_pass ? "pass" : "FAIL") << " ("
            << cfg.snr_list.size() << " SNR points, rounds=" << cfg.rounds
            << " each, agreement nondecreasing=" << (nondecreasing ? "true" : "false") << ")\n";
  return all_pass ? 0 : 1;
}

int run_replay(const ExperimentConfig& cfg) {
  if (cfg.trace.empty()) throw ConfigError("trace", "replay requires an input trace path");
  auto records = load_iq_trace(cfg.trace);
  auto phases = replay_ingest(records, cfg.discard_fraction);
  UniformityReport rep = kuiper_uniformity(std::span<const Phase>(phases), kSignificance);
  std::vector<std::string> header{"records", "survivors", "discard_fraction", "kuiper_v",
                                  "modified_statistic", "critical_value", "pass"};
  CsvReport report(cfg.out, header);
  report.write_row(std::array<std::string, 7>{
      std::to_string(records.size()), std::to_string(phases.size()), fmt(cfg.discard_fraction),
      fmt(rep.statistic), fmt(rep.modified_statistic), fmt(rep.critical_value),
      rep.pass ? "true" : "false"});
  report.close();
  std::cout << "replay: " << (rep.pass ? "pass" : "FAIL") << " (" << records.size()
            << " records, " << phases.size() << " survivors)\n";
  return rep.pass ? 0 : 1;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", "line " + std::to_string(line_no) + " is not key=value");
    }
    cfg.apply(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  return cfg;
}

void ExperimentConfig::apply(const std::string& key, const std::string& value) {
  if (key == "kind") {
    kind = value;
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "k") {
    mirrors = static_cast<int>(parse_int(key, value));
  } else if (key == "n") {
    eve_antennas = static_cast<int>(parse_int(key, value));
  } else if (key == "s") {
    tones = static_cast<int>(parse_int(key, value));
  } else if (key == "snr_db") {
    snr_db = parse_double(key, value);
  } else if (key == "los_magnitude") {
    los_magnitude = parse_double(key, value);
  } else if (key == "m") {
    bits_per_symbol = static_cast<int>(parse_int(key, value));
  } else if (key == "l") {
    info_bits = static_cast<int>(parse_int(key, value));
  } else if (key == "r") {
    redundancy_bits = static_cast<int>(parse_int(key, value));
  } else if (key == "rounds") {
    rounds = static_cast<int>(parse_int(key, value));
  } else if (key == "discard_fraction") {
    discard_fraction = parse_double(key, value);
  } else if (key == "protocol") {
    protocol = value;
  } else if (key == "out") {
    out = value;
  } else if (key == "trace") {
    trace = value;
  } else if (key == "snr_list") {
    snr_list.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) snr_list.push_back(parse_double(key, trim(item)));
    if (snr_list.empty()) throw ConfigError(key, "empty list");
  } else {
    throw ConfigError(key, "unknown key");
  }
}

void ExperimentConfig::validate() const {
  if (kind != "uniformity" && kind != "leakage" && kind != "exchange" && kind != "sweep" &&
      kind != "replay") {
    throw ConfigError("kind", "must be uniformity|leakage|exchange|sweep|replay");
  }
  if (mirrors < 1 || mirrors > 30) throw ConfigError("k", "must be in [1, 30]");
  if (eve_antennas < 0) throw ConfigError("n", "must be >= 0");
  if (tones < 1) throw ConfigError("s", "must be >= 1");
  if (bits_per_symbol < 1) throw ConfigError("m", "must be >= 1");
  if (info_bits < 1) throw ConfigError("l", "must be >= 1");
  if (redundancy_bits < 0) throw ConfigError("r", "must be >= 0");
  if (rounds < 1) throw ConfigError("rounds", "must be >= 1");
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) {
    throw ConfigError("discard_fraction", "must be in [0, 1)");
  }
  if ((info_bits + redundancy_bits) % bits_per_symbol != 0) {
    throw ConfigError("l", "l + r must be divisible by m");
  }
  if (protocol != "two" && protocol != "four") throw ConfigError("protocol", "must be two|four");
  if (!(los_magnitude >= 0.0)) throw ConfigError("los_magnitude", "must be >= 0");
  if (out.empty()) throw ConfigError("out", "must not be empty");
}

std::vector<IQRecord> parse_iq_trace(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "state,i,q") {
    throw std::runtime_error(origin + ": expected header 'state,i,q'");
  }
  std::vector<IQRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty()) continue;
    std::size_t c1 = s.find(',');
    std::size_t c2 = c1 == std::string::npos ? std::string::npos : s.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw std::runtime_error(origin + ": line " + std::to_string(line_no) +
                               " is not state,i,q");
    }
    IQRecord rec;
    rec.state_label = trim(s.substr(0, c1));
    double re = parse_double("i", trim(s.substr(c1 + 1, c2 - c1 - 1)));
    double im = parse_double("q", trim(s.substr(c2 + 1)));
    rec.sample = {re, im};
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<IQRecord> load_iq_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return parse_iq_trace(in, path);
}

std::vector<Phase> replay_ingest(std::span<const IQRecord> trace, double discard_fraction) {
  if (trace.size() < 100) {
    throw InsufficientDataError("replay_ingest: need at least 100 records");
  }
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) {
    throw std::invalid_argument("replay_ingest: discard_fraction must be in [0, 1)");
  }
  // Mean subtraction strictly precedes the energy sort: the LOS bias must be
  // gone before magnitudes mean anything.
  std::complex<double> mean{0.0, 0.0};
  for (const IQRecord& r : trace) mean += r.sample;
  mean /= static_cast<double>(trace.size());
  std::vector<std::complex<double>> centered;
  centered.reserve(trace.size());
  for (const IQRecord& r : trace) centered.push_back(r.sample - mean);

  std::vector<std::size_t> order(centered.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::norm(centered[a]) < std::norm(centered[b]);
  });
  const auto drop = static_cast<std::size_t>(
      std::floor(discard_fraction * static_cast<double>(trace.size())));
  std::vector<std::size_t> kept(order.begin() + static_cast<std::ptrdiff_t>(drop), order.end());
  std::sort(kept.begin(), kept.end());  // restore input order for the survivors
  std::vector<Phase> phases;
  phases.reserve(kept.size());
  for (std::size_t idx : kept) phases.push_back(wrap(std::arg(centered[idx])));
  return phases;
}

int run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.kind == "uniformity") return run_uniformity(config);
  if (config.kind == "leakage") return run_leakage(config);
  if (config.kind == "exchange") return run_exchange(config);
  if (config.kind == "sweep") return run_sweep(config);
  return run_replay(config);
}

}  // namespace phasekey
