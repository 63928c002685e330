#pragma once

// Readers for the three input formats (spin-system, pulse-sequence and
// circuit files) and JSON helpers for reports. Grammars are in
// docs/formats.md. Spin indices are 1-based in files and 0-based in memory.

#include "tfq/circuits.hpp"
#include "tfq/nmr.hpp"
#include "tfq/timeflow.hpp"

#include <json.hpp>

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>

namespace tfq::io {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Accepts a plain number or an expression [-][k*]pi[/m], e.g. "-pi/2",
/// "3*pi/4", "0.25".
double parse_angle(const std::string& text);

nmr::SpinSystem parse_spin_system(std::istream& in,
                                  const std::string& source = "<input>");
nmr::SpinSystem load_spin_system(const std::string& path);

struct Acquisition {
  std::size_t detect;  // 0-based
  double duration;     // s
  std::size_t points;
  double line_broadening = 0.0;  // Hz
};

struct SequenceFile {
  std::optional<nmr::PauliProductState> init;
  nmr::PulseSequence sequence;
  std::optional<Acquisition> acquisition;
  double readout_phase = 0.0;  // rad, applied to the spectrum
};

SequenceFile parse_sequence(std::istream& in,
                            const std::string& source = "<input>");
SequenceFile load_sequence(const std::string& path);

struct CircuitDescription {
  std::size_t d;
  PureState psi;
  ComplexMatrix u, v, w;
  EntangledState phi, omega;
};

CircuitDescription parse_circuit(const nlohmann::json& j);
CircuitDescription parse_circuit(std::istream& in,
                          const std::string& source = "<input>");
CircuitDescription load_circuit(const std::string& path);

nlohmann::json to_json(const PureState& v);
nlohmann::json to_json(const ComplexMatrix& m);
nlohmann::json to_json(Complex z);

}  // namespace tfq::io
