#include "tfq/verify.hpp"

#include "tfq/circuits.hpp"
#include "tfq/timeflow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

namespace tfq::verify {

namespace {

struct Property {
  const char* name;
  // Returns the deviation of one trial at dimension d.
  std::function<double(std::size_t d, std::mt19937_64& rng, bool fault)> trial;
  bool qubit_only = false;
  bool count_based = false;  // deviation is a misclassification count
};

std::mt19937_64 trial_rng(std::uint64_t seed, std::size_t property,
                          std::size_t d, std::size_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(property),
                    static_cast<std::uint32_t>(d),
                    static_cast<std::uint32_t>(trial)};
  return std::mt19937_64(seq);
}

Complex random_phase(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  return std::polar(1.0, angle(rng));
}

std::vector<Encoding> encodings_for(std::size_t d, std::mt19937_64& rng) {
  std::vector<Encoding> out;
  if (d == 2) {
    out.push_back(Encoding::spin_half(random_phase(rng)));
  } else {
    out.push_back(Encoding::higher_spin(d, random_phase(rng)));
  }
  out.push_back(Encoding::photon_number(d));
  return out;
}

PureState chain_output(const TeleportCircuit& c, const PureState& psi,
                       const Encoding& e, bool fault) {
  return detail::timeflow_trace(c, psi, e, !fault)[3].vector;
}

double backward_state_closed_form(std::size_t d, std::mt19937_64& rng, bool) {
  const PureState psi = random::haar_state(d, rng);
  const EntangledState phi(random::haar_state(d * d, rng), d);
  const BackwardState b = backward_state(psi, phi);
  return max_abs_diff(b.density, b.vector * b.vector.adjoint());
}

double maximal_entanglement_criterion(std::size_t d, std::mt19937_64& rng, bool) {
  const double tol = 1e-8;
  double errors = 0.0;
  auto classify = [&](const EntangledState& s, bool expected) {
    const bool by_trace = is_maximally_entangled(s, tol);
    const bool by_unitarity = is_unitary(m_of_state(s), tol);
    if (by_trace != expected) errors += 1.0;
    if (by_unitarity != expected) errors += 1.0;
  };
  classify(random_max_entangled(d, rng), true);
  classify(EntangledState(random::haar_state(d * d, rng), d), false);
  return errors;
}

double chi_relation(std::size_t d, std::mt19937_64& rng, bool fault) {
  const EntangledState psi = random_max_entangled(d, rng);
  double worst = 0.0;
  for (const auto& e : encodings_for(d, rng)) {
    const ComplexMatrix chi = detail::chi_of_state(psi, e, !fault);
    const PureState mapped =
        kron(chi, gates::identity(d)) * canonical_state(e).state();
    worst = std::max(worst, max_abs_diff(mapped, psi.state()));
  }
  return worst;
}

double gamma_sign(std::size_t d, std::mt19937_64& rng, bool) {
  double worst = 0.0;
  for (const auto& e : encodings_for(d, rng)) {
    const int g = encoding_gamma(e);
    const ComplexMatrix square = e.m_t() * e.m_t().conjugate();
    worst = std::max(worst, max_abs_diff(square, g * gates::identity(d)));
    worst = std::max(worst, std::abs(g * g - 1.0));
  }
  return worst;
}

double spin_flip(std::size_t, std::mt19937_64& rng, bool fault) {
  const PureState psi = random::haar_state(2, rng);
  const Encoding e = Encoding::spin_half(random_phase(rng));
  const Eigen::Vector3d before = spin_expectation(psi);
  const Eigen::Vector3d after =
      spin_expectation(detail::time_reverse_state(psi, e, !fault));
  return (after + before).cwiseAbs().maxCoeff();
}

double timeflow_chain(std::size_t d, std::mt19937_64& rng, bool fault) {
  const TeleportCircuit c = TeleportCircuit::random(d, rng);
  const PureState psi = random::haar_state(d, rng);
  double worst = 0.0;
  for (const auto& e : encodings_for(d, rng)) {
    const auto steps = detail::timeflow_trace(c, psi, e, !fault);
    worst = std::max(worst, max_abs_diff(steps[3].vector, steps[4].vector));
  }
  return worst;
}

double semantics_equivalence(std::size_t d, std::mt19937_64& rng, bool fault) {
  const TeleportCircuit c = TeleportCircuit::random(d, rng);
  const PureState psi = random::haar_state(d, rng);
  const OutcomeReport oracle = forward_oracle(c, psi).at(0);
  double worst = 0.0;
  for (const auto& e : encodings_for(d, rng)) {
    worst = std::max(worst, phase_aligned_distance(oracle.raw,
                                                   chain_output(c, psi, e, fault)));
    worst = std::max(worst, phase_aligned_distance(oracle.raw,
                                                   timeflow_eval(c, psi, e).raw));
  }
  return worst;
}

double probability_law(std::size_t d, std::mt19937_64& rng, bool) {
  const TeleportCircuit c = TeleportCircuit::random(d, rng);
  const PureState psi = random::haar_state(d, rng);
  const double expected = 1.0 / static_cast<double>(d * d);
  double worst = 0.0;
  double total = 0.0;
  for (const auto& [k, r] : forward_oracle(c, psi)) {
    worst = std::max(worst, std::abs(r.probability - expected));
    total += r.probability;
  }
  worst = std::max(worst, std::abs(total - 1.0));
  for (const auto& e : encodings_for(d, rng)) {
    worst = std::max(worst,
                     std::abs(timeflow_eval(c, psi, e).probability - expected));
  }
  return worst;
}

double encoding_independence(std::size_t d, std::mt19937_64& rng, bool fault) {
  const TeleportCircuit c = TeleportCircuit::random(d, rng);
  const PureState psi = random::haar_state(d, rng);
  const PureState reference = chain_output(c, psi, Encoding::photon_number(d), fault);
  double worst = 0.0;
  for (int k = 0; k < 8; ++k) {
    const Complex alpha = std::polar(1.0, k * std::numbers::pi / 4.0);
    const Encoding e = d == 2 ? Encoding::spin_half(alpha)
                              : Encoding::higher_spin(d, alpha);
    worst = std::max(worst, phase_aligned_distance(reference,
                                                   chain_output(c, psi, e, fault)));
  }
  return worst;
}

double gate_circuit_agreement(std::size_t, std::mt19937_64& rng, bool) {
  const TeleportCircuit c = TeleportCircuit::random(2, rng);
  const PureState psi = random::haar_state(2, rng);
  const auto oracle = forward_oracle(c, psi);
  const auto gates = run_gate_circuit(teleport_gate_circuit(c),
                                      kron(psi, c.phi().state()));
  const auto basis = weyl_basis(c.omega());
  double worst = 0.0;
  for (const auto& [k, r] : oracle) {
    // the gate simulator keeps the measured carriers in the branch state
    const OutcomeReport& g = gates.at(OutcomeKey{k});
    const PureState rest = contract(g.raw, {2, 2, 2}, {0, 1}, basis[k]);
    worst = std::max(worst, std::abs(g.probability - r.probability));
    worst = std::max(worst, phase_aligned_distance(r.raw, rest));
  }
  return worst;
}

const std::vector<Property>& properties() {
  static const std::vector<Property> all{
      {"backward_state_closed_form", backward_state_closed_form},
      {"maximal_entanglement_criterion", maximal_entanglement_criterion, false, true},
      {"chi_relation", chi_relation},
      {"gamma_sign", gamma_sign},
      {"spin_flip", spin_flip, true},
      {"timeflow_chain", timeflow_chain},
      {"semantics_equivalence", semantics_equivalence},
      {"probability_law", probability_law},
      {"encoding_independence", encoding_independence},
      {"gate_circuit_agreement", gate_circuit_agreement, true},
  };
  return all;
}

}  // namespace

bool Report::all_passed() const {
  return std::all_of(results.begin(), results.end(),
                     [](const PropertyResult& r) { return r.passed; });
}

std::vector<std::string> property_names() {
  std::vector<std::string> out;
  for (const auto& p : properties()) out.emplace_back(p.name);
  return out;
}

Report run(const Config& config) {
  if (config.trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (!(config.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (config.dims.empty()) throw std::invalid_argument("no dimensions given");
  for (auto d : config.dims) {
    if (d < 2 || d > 16) throw std::invalid_argument("dimensions must lie in [2, 16]");
  }

  Report report;
  const auto& props = properties();
  for (std::size_t p = 0; p < props.size(); ++p) {
    PropertyResult r{props[p].name, 0, 0.0, false};
    std::vector<std::size_t> dims = config.dims;
    if (props[p].qubit_only) dims = {2};
    for (auto d : dims) {
      for (std::size_t t = 0; t < config.trials; ++t) {
        auto rng = trial_rng(config.seed, p, d, t);
        r.max_deviation =
            std::max(r.max_deviation, props[p].trial(d, rng, config.inject_fault));
        ++r.trials;
      }
    }
    r.passed = props[p].count_based ? r.max_deviation == 0.0
                                    : r.max_deviation <= config.tol;
    report.results.push_back(r);
  }
  return report;
}

}  // namespace tfq::verify
