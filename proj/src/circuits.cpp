#include "tfq/circuits.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tfq {

namespace {

constexpr double kUnitaryTol = 1e-9;
constexpr double kBasisTol = 1e-10;

void require_local_unitary(const ComplexMatrix& m, std::size_t d,
                           const char* name) {
  if (m.rows() != static_cast<Eigen::Index>(d) || m.cols() != m.rows()) {
    throw std::invalid_argument(std::string("TeleportCircuit: ") + name +
                                " must be " + std::to_string(d) + "x" +
                                std::to_string(d));
  }
  if (!all_finite(m) || !is_unitary(m, kUnitaryTol)) {
    throw std::invalid_argument(std::string("TeleportCircuit: ") + name +
                                " is not unitary");
  }
}

void require_dim(const PureState& psi, std::size_t d, const char* where) {
  if (static_cast<std::size_t>(psi.size()) != d) {
    throw std::invalid_argument(std::string(where) + ": input dimension " +
                                std::to_string(psi.size()) + " != " +
                                std::to_string(d));
  }
}

}  // namespace

TeleportCircuit::TeleportCircuit(ComplexMatrix u, ComplexMatrix v,
                                 ComplexMatrix w, EntangledState phi,
                                 EntangledState omega)
    : u_(std::move(u)),
      v_(std::move(v)),
      w_(std::move(w)),
      phi_(std::move(phi)),
      omega_(std::move(omega)) {
  const std::size_t d = phi_.d();
  if (omega_.d() != d) {
    throw std::invalid_argument("TeleportCircuit: phi and omega dimensions differ");
  }
  require_local_unitary(u_, d, "U");
  require_local_unitary(v_, d, "V");
  require_local_unitary(w_, d, "W");
  if (!is_maximally_entangled(phi_, 1e-9)) {
    throw std::invalid_argument("TeleportCircuit: phi is not maximally entangled");
  }
  if (!is_maximally_entangled(omega_, 1e-9)) {
    throw std::invalid_argument(
        "TeleportCircuit: omega is not maximally entangled");
  }
}

TeleportCircuit TeleportCircuit::identity(std::size_t d) {
  return {gates::identity(d), gates::identity(d), gates::identity(d),
          max_entangled(d), max_entangled(d)};
}

TeleportCircuit TeleportCircuit::random(std::size_t d, std::mt19937_64& rng) {
  ComplexMatrix u = random::haar_unitary(d, rng);
  ComplexMatrix v = random::haar_unitary(d, rng);
  ComplexMatrix w = random::haar_unitary(d, rng);
  EntangledState phi = random_max_entangled(d, rng);
  EntangledState omega = random_max_entangled(d, rng);
  return {std::move(u), std::move(v), std::move(w), std::move(phi),
          std::move(omega)};
}

OutcomeReport make_report(PureState raw) {
  OutcomeReport r;
  r.probability = raw.squaredNorm();
  r.state = r.probability > 0.0 ? PureState(raw / std::sqrt(r.probability))
                                : PureState(PureState::Zero(raw.size()));
  r.raw = std::move(raw);
  return r;
}

std::vector<PureState> weyl_basis(const EntangledState& omega) {
  const std::size_t d = omega.d();
  const ComplexMatrix x = gates::shift(d);
  const ComplexMatrix z = gates::clock(d);
  const ComplexMatrix id = gates::identity(d);
  std::vector<PureState> basis;
  basis.reserve(d * d);
  ComplexMatrix xa = id;
  for (std::size_t a = 0; a < d; ++a) {
    ComplexMatrix xz = xa;
    for (std::size_t b = 0; b < d; ++b) {
      basis.emplace_back(kron(xz, id) * omega.state());
      xz = xz * z;
    }
    xa = x * xa;
  }
  return basis;
}

std::map<std::size_t, OutcomeReport> forward_oracle(const TeleportCircuit& c,
                                                    const PureState& psi) {
  const std::size_t d = c.d();
  require_dim(psi, d, "forward_oracle");
  const ComplexMatrix local = kron(kron(c.u(), c.v()), c.w());
  const PureState full = local * kron(psi, c.phi().state());
  std::map<std::size_t, OutcomeReport> out;
  const auto basis = weyl_basis(c.omega());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    out.emplace(k, make_report(contract(full, {d, d, d}, {0, 1}, basis[k])));
  }
  return out;
}

OutcomeReport timeflow_eval(const TeleportCircuit& c, const PureState& psi,
                            const Encoding& e) {
  const std::size_t d = c.d();
  require_dim(psi, d, "timeflow_eval");
  if (e.d() != d) {
    throw std::invalid_argument("timeflow_eval: encoding dimension mismatch");
  }
  PureState raw = c.w() * m_of_state(c.phi()) * c.v().transpose() *
                  m_of_state(c.omega()).conjugate() * c.u() * psi;
  return make_report(raw / static_cast<double>(d));
}

std::vector<TraceStep> timeflow_trace(const TeleportCircuit& c,
                                      const PureState& psi,
                                      const Encoding& e) {
  return detail::timeflow_trace(c, psi, e, true);
}

std::vector<TraceStep> detail::timeflow_trace(const TeleportCircuit& c,
                                              const PureState& psi,
                                              const Encoding& e,
                                              bool conjugate) {
  const std::size_t d = c.d();
  require_dim(psi, d, "timeflow_trace");
  if (e.d() != d) {
    throw std::invalid_argument("timeflow_trace: encoding dimension mismatch");
  }
  const double mirror = 1.0 / std::sqrt(static_cast<double>(d));
  const ComplexMatrix chi_omega = detail::chi_of_state(c.omega(), e, conjugate);
  const ComplexMatrix chi_phi = detail::chi_of_state(c.phi(), e, conjugate);

  std::vector<TraceStep> steps;
  steps.push_back({"after_u", chi_omega.adjoint() * c.u() * psi});
  steps.push_back({"first_mirror",
                   mirror * detail::time_reverse_state(steps.back().vector, e,
                                                       conjugate)});
  steps.push_back({"second_mirror",
                   mirror * detail::time_reverse_state(steps.back().vector, e,
                                                       conjugate)});
  const ComplexMatrix v_chain =
      c.w() * detail::time_reverse_gate(chi_phi, e, conjugate) *
      detail::time_reverse_gate(c.v(), e, conjugate);
  steps.push_back({"after_v_chi_w", v_chain * steps.back().vector});
  steps.push_back({"closed_form", timeflow_eval(c, psi, e).raw});
  return steps;
}

NonmaxLoss nonmax_loss(const EntangledState& pi, const PureState& psi) {
  require_dim(psi, pi.d(), "nonmax_loss");
  Eigen::JacobiSVD<ComplexMatrix> svd(m_of_state(pi));
  NonmaxLoss out;
  const auto& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  out.raw = q_of_state(pi) * psi.conjugate();
  out.transmitted_norm2 = out.raw.squaredNorm();
  return out;
}

double entanglement_entropy(const EntangledState& s) {
  Eigen::JacobiSVD<ComplexMatrix> svd(q_of_state(s));
  double h = 0.0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    const double p = svd.singularValues()(k) * svd.singularValues()(k);
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

// ---------------------------------------------------------------------------

GateCircuit::GateCircuit(std::size_t n) : n_(n) {
  if (n == 0 || n > 20) {
    throw std::invalid_argument("GateCircuit: carrier count must be in [1, 20]");
  }
}

void GateCircuit::check_carrier(std::size_t c) const {
  if (c >= n_) {
    throw std::out_of_range("GateCircuit: carrier " + std::to_string(c) +
                            " out of range for " + std::to_string(n_) +
                            " carriers");
  }
}

GateCircuit& GateCircuit::gate(std::size_t carrier, const ComplexMatrix& u) {
  check_carrier(carrier);
  if (u.rows() != 2 || u.cols() != 2 || !is_unitary(u, kUnitaryTol)) {
    throw std::invalid_argument("GateCircuit: single-carrier gate must be a 2x2 unitary");
  }
  events_.emplace_back(OneQubitGate{carrier, u});
  return *this;
}

GateCircuit& GateCircuit::gate(std::size_t first, std::size_t second,
                               const ComplexMatrix& u) {
  check_carrier(first);
  check_carrier(second);
  if (first == second) {
    throw std::invalid_argument("GateCircuit: two-carrier gate needs distinct carriers");
  }
  if (u.rows() != 4 || u.cols() != 4 || !is_unitary(u, kUnitaryTol)) {
    throw std::invalid_argument("GateCircuit: two-carrier gate must be a 4x4 unitary");
  }
  events_.emplace_back(TwoQubitGate{first, second, u});
  return *this;
}

GateCircuit& GateCircuit::cnot(std::size_t control, std::size_t target) {
  return gate(control, target, gates::cnot());
}

GateCircuit& GateCircuit::cphase(std::size_t a, std::size_t b, double phi) {
  return gate(a, b, gates::cphase(phi));
}

GateCircuit& GateCircuit::measure(std::vector<std::size_t> carriers,
                                  std::vector<PureState> basis) {
  if (carriers.empty()) {
    throw std::invalid_argument("GateCircuit: measurement needs carriers");
  }
  std::vector<bool> seen(n_, false);
  for (auto c : carriers) {
    check_carrier(c);
    if (seen[c]) throw std::invalid_argument("GateCircuit: repeated carrier");
    seen[c] = true;
  }
  const std::size_t dim = std::size_t{1} << carriers.size();
  if (basis.size() != dim) {
    throw std::invalid_argument("GateCircuit: measurement basis must have " +
                                std::to_string(dim) + " elements");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (static_cast<std::size_t>(basis[i].size()) != dim) {
      throw std::invalid_argument("GateCircuit: basis vector dimension mismatch");
    }
    for (std::size_t j = 0; j <= i; ++j) {
      const Complex ip = basis[j].dot(basis[i]);
      const double expect = (i == j) ? 1.0 : 0.0;
      if (std::abs(ip - expect) > kBasisTol) {
        throw std::invalid_argument("GateCircuit: measurement basis is not orthonormal");
      }
    }
  }
  events_.emplace_back(Measurement{std::move(carriers), std::move(basis)});
  return *this;
}

GateCircuit& GateCircuit::measure_computational(std::vector<std::size_t> carriers) {
  const std::size_t dim = std::size_t{1} << carriers.size();
  std::vector<PureState> basis;
  for (std::size_t k = 0; k < dim; ++k) {
    basis.push_back(PureState::Unit(dim, k));
  }
  return measure(std::move(carriers), std::move(basis));
}

GateCircuit& GateCircuit::bell_measure(std::size_t a, std::size_t b) {
  cnot(a, b);
  gate(a, gates::hadamard());
  return measure_computational({a, b});
}

GateCircuit& GateCircuit::bell_prepare(std::size_t a, std::size_t b) {
  gate(a, gates::hadamard());
  return cnot(a, b);
}

std::map<OutcomeKey, OutcomeReport> run_gate_circuit(const GateCircuit& g,
                                                     const PureState& input) {
  const std::size_t n = g.n();
  if (input.size() != (Eigen::Index{1} << n)) {
    throw std::invalid_argument("run_gate_circuit: input dimension " +
                                std::to_string(input.size()) +
                                " does not match " + std::to_string(n) +
                                " carriers");
  }
  const std::vector<std::size_t> dims(n, 2);
  std::vector<std::pair<OutcomeKey, PureState>> branches{{{}, input}};

  for (const auto& event : g.events()) {
    if (const auto* one = std::get_if<OneQubitGate>(&event)) {
      for (auto& [key, state] : branches) {
        apply_one_qubit(state, n, one->carrier, one->matrix);
      }
    } else if (const auto* two = std::get_if<TwoQubitGate>(&event)) {
      for (auto& [key, state] : branches) {
        apply_two_qubit(state, n, two->first, two->second, two->matrix);
      }
    } else {
      const auto& m = std::get<Measurement>(event);
      std::vector<std::pair<OutcomeKey, PureState>> next;
      next.reserve(branches.size() * m.basis.size());
      for (const auto& [key, state] : branches) {
        for (std::size_t k = 0; k < m.basis.size(); ++k) {
          const PureState rest = contract(state, dims, m.carriers, m.basis[k]);
          OutcomeKey child = key;
          child.push_back(k);
          next.emplace_back(std::move(child),
                            embed(m.basis[k], rest, dims, m.carriers));
        }
      }
      branches = std::move(next);
    }
  }

  std::map<OutcomeKey, OutcomeReport> out;
  for (auto& [key, state] : branches) {
    out.emplace(key, make_report(std::move(state)));
  }
  return out;
}

GateCircuit teleport_gate_circuit(const TeleportCircuit& c) {
  if (c.d() != 2) {
    throw std::invalid_argument("teleport_gate_circuit: qubit circuits only");
  }
  GateCircuit g(3);
  g.gate(0, c.u()).gate(1, c.v()).gate(2, c.w());
  g.measure({0, 1}, weyl_basis(c.omega()));
  return g;
}

std::size_t bell_outcome_index(Bell b) {
  switch (b) {
    case Bell::PhiPlus:
      return 0;
    case Bell::PsiPlus:
      return 1;
    case Bell::PhiMinus:
      return 2;
    case Bell::PsiMinus:
      return 3;
  }
  throw std::invalid_argument("bell_outcome_index: unknown Bell state");
}

GateCircuit acausal_circuit(int a, Bell pair) {
  if (a != 0 && a != 1) {
    throw std::invalid_argument("acausal_circuit: a must be 0 or 1");
  }
  // carriers 0..3 correspond to carriers 1..4 of the experiment
  const std::size_t bits = bell_outcome_index(pair);
  GateCircuit g(4);
  if (bits & 2) g.gate(1, gates::pauli_x());
  if (bits & 1) g.gate(2, gates::pauli_x());
  g.bell_prepare(1, 2);
  g.cnot(2, 3);
  if (a == 1) g.gate(0, gates::pauli_x());
  g.bell_measure(0, 1);
  return g;
}

OutcomeReport acausal_experiment(int a, Bell pair) {
  const GateCircuit g = acausal_circuit(a, pair);
  const auto reports = run_gate_circuit(g, PureState::Unit(16, 0));
  const std::size_t k = bell_outcome_index(pair);
  const OutcomeReport& hit = reports.at(OutcomeKey{k});
  return make_report(
      contract(hit.raw, {2, 2, 2, 2}, {0, 1}, PureState::Unit(4, k)));
}

}  // namespace tfq
