// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace phasekey {

// Pilot average magnitude fell below the floor; the measurement is an erasure.
struct DegenerateAverageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Link endpoints do not form a modeled over-air or internal-wired link.
struct InvalidLinkError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Mirror count too large to index the state space.
struct CapacityError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A mirror state was reused where the protocol demands a fresh one.
struct StateReuseError : std::logic_error {
  using std::logic_error::logic_error;
};

// Bit-stream length inconsistent with the framing (m, L, codeword size).
struct FramingError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Phase streams too short for the requested exchange.
struct InsufficientKeyMaterialError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Too few samples for a statistical test.
struct InsufficientSampleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Too few records for replay analysis.
struct InsufficientDataError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Bad experiment configuration; names the offending field.
struct ConfigError : std::runtime_error {
  ConfigError(std::string field_name, const std::string& what)
      : std::runtime_error("config field '" + field_name + "': " + what),
        field(std::move(field_name)) {}
  std::string field;
};

}  // namespace phasekey
