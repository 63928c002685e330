#pragma once

// Teleportation-like circuits evaluated two ways: a tensor-product
// statevector oracle and the time-flow matrix chain. Also a small qubit
// circuit simulator with post-selection bookkeeping.

#include "tfq/linalg.hpp"
#include "tfq/timeflow.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace tfq {

/// Three carriers of dimension d. phi is prepared on carriers 2,3; carriers
/// 1,2 are measured and post-selected on omega. u, v, w act on carriers
/// 1, 2, 3 between preparation and measurement.
class TeleportCircuit {
 public:
  /// Throws unless u, v, w are d x d unitaries and phi, omega are maximally
  /// entangled states of local dimension d.
  TeleportCircuit(ComplexMatrix u, ComplexMatrix v, ComplexMatrix w,
                  EntangledState phi, EntangledState omega);

  static TeleportCircuit identity(std::size_t d);
  static TeleportCircuit random(std::size_t d, std::mt19937_64& rng);

  std::size_t d() const { return phi_.d(); }
  const ComplexMatrix& u() const { return u_; }
  const ComplexMatrix& v() const { return v_; }
  const ComplexMatrix& w() const { return w_; }
  const EntangledState& phi() const { return phi_; }
  const EntangledState& omega() const { return omega_; }

 private:
  ComplexMatrix u_, v_, w_;
  EntangledState phi_, omega_;
};

struct OutcomeReport {
  PureState state;  // normalized; zero vector when probability is 0
  double probability = 0.0;
  PureState raw;  // unnormalized post-selected vector, |raw|^2 = probability
};

OutcomeReport make_report(PureState raw);

/// The d^2 maximally entangled basis {(X^a Z^b (x) 1)|omega>}, a, b < d,
/// indexed a*d + b. Element 0 is omega itself.
std::vector<PureState> weyl_basis(const EntangledState& omega);

/// Tensor-product simulation: outcome k is the projection of carriers 1,2
/// onto weyl_basis(omega)[k]; index 0 is omega.
std::map<std::size_t, OutcomeReport> forward_oracle(const TeleportCircuit& c,
                                                    const PureState& psi);

/// raw = (1/d) W M_phi V^T conj(M_omega) U psi.
OutcomeReport timeflow_eval(const TeleportCircuit& c, const PureState& psi,
                            const Encoding& e);

struct TraceStep {
  std::string label;
  PureState vector;
};

/// The qubit's path through the circuit, one entry per stage:
///   after_u          chi_omega^dagger U psi
///   first_mirror     (1/sqrt d) T[previous]
///   second_mirror    (1/sqrt d) T[previous]
///   after_v_chi_w    W chi_phi^tr V^tr applied to the previous vector
///   closed_form      timeflow_eval(...).raw
std::vector<TraceStep> timeflow_trace(const TeleportCircuit& c,
                                      const PureState& psi, const Encoding& e);

struct NonmaxLoss {
  std::vector<double> singular_values;  // of M_pi, descending
  PureState raw;                        // Q_pi conj(psi)
  double transmitted_norm2 = 0.0;       // |raw|^2
};

NonmaxLoss nonmax_loss(const EntangledState& pi, const PureState& psi);

/// Entanglement entropy (natural log) of a bipartite pure state.
double entanglement_entropy(const EntangledState& s);

// ---------------------------------------------------------------------------
// Qubit gate circuits

struct OneQubitGate {
  std::size_t carrier;
  ComplexMatrix matrix;
};

/// A 4x4 gate on (first, second); for CNOT first is the control.
struct TwoQubitGate {
  std::size_t first;
  std::size_t second;
  ComplexMatrix matrix;
};

/// Projective measurement of `carriers` in an orthonormal basis of their
/// joint space; every outcome is kept as a separate branch.
struct Measurement {
  std::vector<std::size_t> carriers;
  std::vector<PureState> basis;
};

using CircuitEvent = std::variant<OneQubitGate, TwoQubitGate, Measurement>;

class GateCircuit {
 public:
  explicit GateCircuit(std::size_t n);

  GateCircuit& gate(std::size_t carrier, const ComplexMatrix& u);
  GateCircuit& gate(std::size_t first, std::size_t second,
                    const ComplexMatrix& u);
  GateCircuit& cnot(std::size_t control, std::size_t target);
  GateCircuit& cphase(std::size_t a, std::size_t b, double phi);
  /// Throws unless the basis is orthonormal and complete. Basis vectors and
  /// outcome indices put the measured carriers in ascending order.
  GateCircuit& measure(std::vector<std::size_t> carriers,
                       std::vector<PureState> basis);
  GateCircuit& measure_computational(std::vector<std::size_t> carriers);
  /// Inverse entangler (CNOT a->b, H on a) followed by a computational
  /// measurement of a, b. Outcome 0 is PHI+, 1 PSI+, 2 PHI-, 3 PSI-.
  GateCircuit& bell_measure(std::size_t a, std::size_t b);
  /// H on a, CNOT a->b: maps |00> to PHI+.
  GateCircuit& bell_prepare(std::size_t a, std::size_t b);

  std::size_t n() const { return n_; }
  const std::vector<CircuitEvent>& events() const { return events_; }

 private:
  void check_carrier(std::size_t c) const;

  std::size_t n_;
  std::vector<CircuitEvent> events_;
};

/// Outcome key: one basis index per measurement, in circuit order. A
/// circuit without measurements yields the single key {}.
using OutcomeKey = std::vector<std::size_t>;

std::map<OutcomeKey, OutcomeReport> run_gate_circuit(const GateCircuit& g,
                                                     const PureState& input);

/// The teleportation circuit as a 3-qubit GateCircuit acting on psi (x) phi,
/// measured in weyl_basis(omega). Requires d = 2.
GateCircuit teleport_gate_circuit(const TeleportCircuit& c);

/// Four-carrier acausality circuit: Bell pair `pair` on carriers 2,3, CNOT
/// 3->4, X on carrier 1 when a = 1, Bell measurement on 1,2 post-selected on
/// `pair`. Returns the carriers-3,4 state with its post-selection
/// probability.
OutcomeReport acausal_experiment(int a, Bell pair = Bell::PhiPlus);

/// The GateCircuit used by acausal_experiment, and the index of the
/// post-selected outcome within its single measurement.
GateCircuit acausal_circuit(int a, Bell pair);
std::size_t bell_outcome_index(Bell b);

}  // namespace tfq

namespace tfq::detail {
// timeflow_trace with complex conjugation optionally disabled in both mirror
// steps and in chi; used only for fault injection.
std::vector<TraceStep> timeflow_trace(const TeleportCircuit& c,
                                      const PureState& psi, const Encoding& e,
                                      bool conjugate);
}  // namespace tfq::detail
