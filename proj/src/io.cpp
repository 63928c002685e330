#include "tfq/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

namespace tfq::io {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string strip_comment(const std::string& line) {
  return trim(line.substr(0, line.find('#')));
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw ParseError("not a number: '" + text + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError("expected a non-negative integer, got '" + text + "'");
  }
  return std::stoul(text);
}

std::ifstream open_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return in;
}

[[noreturn]] void fail_at(const std::string& source, std::size_t line,
                          const std::string& what) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

// ---------------------------------------------------------------------------
// Circuit files

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ParseError("field '" + field + "': " + what);
}

Complex complex_entry(const json& e, const std::string& field) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  field_error(field, "entries must be numbers or [re, im] pairs");
}

std::vector<Complex> complex_list(const json& j, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected a list");
  std::vector<Complex> out;
  for (const auto& e : j) out.push_back(complex_entry(e, field));
  return out;
}

double angle_value(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return parse_angle(j.get<std::string>());
    } catch (const ParseError& e) {
      field_error(field, e.what());
    }
  }
  field_error(field, "expected an angle");
}

ComplexMatrix named_gate(const std::string& name, std::size_t d,
                         const std::string& field) {
  const std::string key = trim(name);
  if (key == "I") return gates::identity(d);
  const auto open = key.find('(');
  const std::string head = key.substr(0, open);
  if (d != 2) field_error(field, "named gate '" + key + "' requires d = 2");
  if (open == std::string::npos) {
    if (head == "X") return gates::pauli_x();
    if (head == "Y") return gates::pauli_y();
    if (head == "Z") return gates::pauli_z();
    if (head == "H") return gates::hadamard();
    if (head == "S") return gates::phase_s();
    field_error(field, "unknown gate '" + key + "'");
  }
  if (key.back() != ')') field_error(field, "unbalanced parenthesis in '" + key + "'");
  double theta = 0.0;
  try {
    theta = parse_angle(trim(key.substr(open + 1, key.size() - open - 2)));
  } catch (const ParseError& e) {
    field_error(field, e.what());
  }
  if (head == "RX") return gates::rx(theta);
  if (head == "RY") return gates::ry(theta);
  if (head == "RZ") return gates::rz(theta);
  field_error(field, "unknown gate '" + key + "'");
}

ComplexMatrix gate_field(const json& j, const char* field, std::size_t d) {
  if (!j.contains(field)) return gates::identity(d);
  const json& g = j.at(field);
  ComplexMatrix m;
  if (g.is_string()) {
    m = named_gate(g.get<std::string>(), d, field);
  } else {
    const auto entries = complex_list(g, field);
    if (entries.size() != d * d) {
      field_error(field, "expected " + std::to_string(d * d) +
                             " row-major entries, got " +
                             std::to_string(entries.size()));
    }
    m = make_matrix(d, d, entries);
  }
  if (!is_unitary(m, 1e-9)) field_error(field, "matrix is not unitary");
  return m;
}

EntangledState bell_by_name(const std::string& name, std::size_t d,
                            const std::string& field) {
  if (name == "MAX") return max_entangled(d);
  Bell b;
  if (name == "PHI+") {
    b = Bell::PhiPlus;
  } else if (name == "PHI-" || name == "PHI−") {
    b = Bell::PhiMinus;
  } else if (name == "PSI+") {
    b = Bell::PsiPlus;
  } else if (name == "PSI-" || name == "PSI−") {
    b = Bell::PsiMinus;
  } else {
    field_error(field, "unknown state name '" + name + "'");
  }
  if (d != 2) field_error(field, "Bell state names require d = 2");
  return bell_state(b);
}

EntangledState pair_field(const json& j, const char* field, std::size_t d) {
  if (!j.contains(field)) return d == 2 ? bell_state(Bell::PhiPlus) : max_entangled(d);
  const json& s = j.at(field);
  if (s.is_string()) return bell_by_name(s.get<std::string>(), d, field);
  if (s.is_object()) {
    if (!s.contains("theta") || s.size() != 1) {
      field_error(field, "object form must be {\"theta\": angle}");
    }
    if (d != 2) field_error(field, "the theta family requires d = 2");
    return pi_state(angle_value(s.at("theta"), field));
  }
  const auto amps = complex_list(s, field);
  if (amps.size() != d * d) {
    field_error(field, "expected " + std::to_string(d * d) + " amplitudes");
  }
  try {
    return EntangledState(make_state(amps), d);
  } catch (const std::invalid_argument& e) {
    field_error(field, e.what());
  }
}

}  // namespace

double parse_angle(const std::string& raw) {
  std::string text = lower(trim(raw));
  if (text.empty()) throw ParseError("empty angle");
  if (text.find("pi") == std::string::npos) return parse_number(text);

  double sign = 1.0;
  if (text[0] == '-' || text[0] == '+') {
    if (text[0] == '-') sign = -1.0;
    text = text.substr(1);
  }
  const auto at = text.find("pi");
  double k = 1.0;
  if (at > 0) {
    std::string coef = text.substr(0, at);
    if (coef.back() != '*') throw ParseError("bad angle '" + raw + "'");
    coef.pop_back();
    k = parse_number(coef);
  }
  std::string rest = text.substr(at + 2);
  double m = 1.0;
  if (!rest.empty()) {
    if (rest[0] != '/') throw ParseError("bad angle '" + raw + "'");
    m = parse_number(rest.substr(1));
    if (m == 0.0) throw ParseError("division by zero in angle '" + raw + "'");
  }
  return sign * k * std::numbers::pi / m;
}

nmr::SpinSystem parse_spin_system(std::istream& in, const std::string& source) {
  std::optional<std::size_t> n;
  std::optional<std::vector<double>> larmor;
  std::optional<std::vector<double>> upper;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string body = strip_comment(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail_at(source, line_no, "expected 'key = value'");
    const std::string key = lower(trim(body.substr(0, eq)));
    const auto words = split_words(body.substr(eq + 1));
    try {
      if (key == "spins") {
        if (words.size() != 1) throw ParseError("'spins' takes one value");
        n = parse_count(words[0]);
        if (*n == 0) throw ParseError("need at least one spin");
      } else if (key == "larmor") {
        larmor.emplace();
        for (const auto& w : words) larmor->push_back(parse_number(w));
      } else if (key == "j") {
        upper.emplace();
        for (const auto& w : words) upper->push_back(parse_number(w));
      } else {
        throw ParseError("unknown key '" + key + "'");
      }
    } catch (const ParseError& e) {
      fail_at(source, line_no, e.what());
    }
  }
  if (!n) throw ParseError(source + ": missing 'spins'");
  if (!larmor) throw ParseError(source + ": missing 'larmor'");
  if (larmor->size() != *n) {
    throw ParseError(source + ": 'larmor' has " + std::to_string(larmor->size()) +
                     " values for " + std::to_string(*n) + " spins");
  }
  const std::size_t pairs = *n * (*n - 1) / 2;
  if (!upper) {
    if (pairs != 0) throw ParseError(source + ": missing 'j'");
    upper.emplace();
  }
  if (upper->size() != pairs) {
    throw ParseError(source + ": 'j' needs " + std::to_string(pairs) +
                     " upper-triangle values, got " + std::to_string(upper->size()));
  }
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(*n, *n);
  std::size_t k = 0;
  for (std::size_t a = 0; a < *n; ++a) {
    for (std::size_t b = a + 1; b < *n; ++b) {
      j(a, b) = j(b, a) = (*upper)[k++];
    }
  }
  return nmr::SpinSystem(*larmor, j);
}

nmr::SpinSystem load_spin_system(const std::string& path) {
  auto in = open_file(path);
  return parse_spin_system(in, path);
}

SequenceFile parse_sequence(std::istream& in, const std::string& source) {
  SequenceFile out;
  std::size_t line_no = 0;
  auto spin_index = [](const std::string& w) {
    const std::size_t s = parse_count(w);
    if (s == 0) throw ParseError("spin numbers start at 1");
    return s - 1;
  };
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto words = split_words(strip_comment(line));
    if (words.empty()) continue;
    const std::string kind = lower(words[0]);
    const std::size_t args = words.size() - 1;
    try {
      if (kind == "init") {
        if (args != 1) throw ParseError("usage: init <label>");
        if (out.init) throw ParseError("duplicate 'init'");
        try {
          out.init.emplace(words[1]);
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what());
        }
      } else if (kind == "rotate") {
        if (args < 3) throw ParseError("usage: rotate <axis> <angle> <spin>...");
        std::string axis = lower(words[1]);
        double sign = 1.0;
        if (axis.size() == 2 && (axis[0] == '-' || axis[0] == '+')) {
          if (axis[0] == '-') sign = -1.0;
          axis = axis.substr(1);
        }
        nmr::Axis a;
        if (axis == "x") {
          a = nmr::Axis::X;
        } else if (axis == "y") {
          a = nmr::Axis::Y;
        } else if (axis == "z") {
          a = nmr::Axis::Z;
        } else {
          throw ParseError("unknown axis '" + words[1] + "'");
        }
        nmr::Rotation r{{}, a, sign * parse_angle(words[2])};
        for (std::size_t k = 3; k < words.size(); ++k) r.spins.push_back(spin_index(words[k]));
        out.sequence.events.emplace_back(std::move(r));
      } else if (kind == "jcouple") {
        if (args != 3) throw ParseError("usage: jcouple <spin> <spin> <angle>");
        out.sequence.events.emplace_back(nmr::JCoupling{
            spin_index(words[1]), spin_index(words[2]), parse_angle(words[3])});
      } else if (kind == "delay") {
        if (args != 1) throw ParseError("usage: delay <seconds>");
        const double t = parse_number(words[1]);
        if (t < 0.0) throw ParseError("negative delay");
        out.sequence.events.emplace_back(nmr::Delay{t});
      } else if (kind == "gradient") {
        if (args < 1) throw ParseError("usage: gradient <spin>...");
        nmr::Gradient g;
        for (std::size_t k = 1; k < words.size(); ++k) g.spins.push_back(spin_index(words[k]));
        out.sequence.events.emplace_back(std::move(g));
      } else if (kind == "acquire") {
        if (args != 3 && args != 4) {
          throw ParseError("usage: acquire <spin> <duration> <points> [line-broadening]");
        }
        if (out.acquisition) throw ParseError("duplicate 'acquire'");
        Acquisition acq{spin_index(words[1]), parse_number(words[2]),
                        parse_count(words[3]), 0.0};
        if (args == 4) acq.line_broadening = parse_number(words[4]);
        if (!(acq.duration > 0.0)) throw ParseError("duration must be > 0");
        if (acq.points < 2) throw ParseError("need at least 2 points");
        out.acquisition = acq;
      } else if (kind == "phase") {
        if (args != 1) throw ParseError("usage: phase <angle>");
        out.readout_phase = parse_angle(words[1]);
      } else {
        throw ParseError("unknown event '" + words[0] + "'");
      }
    } catch (const ParseError& e) {
      fail_at(source, line_no, e.what());
    }
  }
  return out;
}

SequenceFile load_sequence(const std::string& path) {
  auto in = open_file(path);
  return parse_sequence(in, path);
}

CircuitDescription parse_circuit(const json& j) {
  if (!j.is_object()) throw ParseError("circuit must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    static const std::vector<std::string> known{"d", "psi", "U", "V", "W", "phi", "omega"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      field_error(key, "unknown field");
    }
  }
  if (!j.contains("d")) field_error("d", "missing");
  if (!j.at("d").is_number_unsigned() || j.at("d").get<std::size_t>() < 2) {
    field_error("d", "must be an integer >= 2");
  }
  const std::size_t d = j.at("d").get<std::size_t>();
  if (!j.contains("psi")) field_error("psi", "missing");
  const auto amps = complex_list(j.at("psi"), "psi");
  if (amps.size() != d) field_error("psi", "expected " + std::to_string(d) + " amplitudes");
  PureState psi = make_state(amps);
  if (std::abs(psi.norm() - 1.0) > 1e-8) field_error("psi", "state is not normalized");

  CircuitDescription desc{d,
                   psi,
                   gate_field(j, "U", d),
                   gate_field(j, "V", d),
                   gate_field(j, "W", d),
                   pair_field(j, "phi", d),
                   pair_field(j, "omega", d)};
  if (!is_maximally_entangled(desc.omega, 1e-9)) {
    field_error("omega", "the measured state must be maximally entangled");
  }
  return desc;
}

CircuitDescription parse_circuit(std::istream& in, const std::string& source) {
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw ParseError(source + ":" + std::to_string(line) + ": invalid JSON");
  }
  try {
    return parse_circuit(j);
  } catch (const ParseError& e) {
    throw ParseError(source + ": " + e.what());
  }
}

CircuitDescription load_circuit(const std::string& path) {
  auto in = open_file(path);
  return parse_circuit(in, path);
}

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const PureState& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(to_json(v(k)));
  return out;
}

json to_json(const ComplexMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(to_json(m(r, c)));
  }
  return out;
}

}  // namespace tfq::io
