#pragma once

// State/matrix correspondence for bipartite states, time reversal of states
// and gates, and the physical encodings that fix the time-reversal unitary.

#include "tfq/linalg.hpp"

#include <string>
#include <utility>

namespace tfq {

/// A physical carrier choice. The anti-unitary time-reversal operator acts as
/// m_t() followed by complex conjugation in the computational basis.
class Encoding {
 public:
  /// Throws unless m_t is unitary and m_t * conj(m_t) = +/-1.
  Encoding(std::string name, ComplexMatrix m_t);

  /// Spin-1/2 carrier: M_T = alpha * sigma_y, |alpha| = 1.
  static Encoding spin_half(Complex alpha = 1.0);
  /// Photon-number carrier of local dimension d: M_T = 1.
  static Encoding photon_number(std::size_t d = 2);
  /// Spin-j carrier with d = 2j + 1; M_T = alpha * exp(-i pi S_y), realised
  /// as the antidiagonal matrix with alternating signs.
  static Encoding higher_spin(std::size_t d, Complex alpha = 1.0);

  const std::string& name() const { return name_; }
  const ComplexMatrix& m_t() const { return m_t_; }
  std::size_t d() const { return static_cast<std::size_t>(m_t_.rows()); }
  int gamma() const { return gamma_; }

 private:
  std::string name_;
  ComplexMatrix m_t_;
  int gamma_;
};

/// A normalized pure state on two carriers of local dimension d.
class EntangledState {
 public:
  /// Throws unless state.size() == d*d and the state is normalized (1e-10).
  EntangledState(PureState state, std::size_t d);
  /// Infers d from a perfect-square dimension.
  explicit EntangledState(PureState state);

  const PureState& state() const { return state_; }
  std::size_t d() const { return d_; }

 private:
  PureState state_;
  std::size_t d_;
};

enum class Bell { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

EntangledState bell_state(Bell which);
/// (1/sqrt(d)) sum_k |kk>.
EntangledState max_entangled(std::size_t d);
/// cos(theta)|00> + sin(theta)|11>.
EntangledState pi_state(double theta);
/// (u (x) 1) |Phi+_d> for a Haar-random u.
EntangledState random_max_entangled(std::size_t d, std::mt19937_64& rng);

/// (Q)_{ij} = <ji|phi>.
ComplexMatrix q_of_state(const EntangledState& phi);
/// Inverse of q_of_state. Throws on non-square input; the result must be
/// normalized for EntangledState to accept it.
EntangledState state_of_q(const ComplexMatrix& q);
/// sqrt(d) * Q.
ComplexMatrix m_of_state(const EntangledState& phi);

/// d * tr_1(|phi><phi|) equals the identity within tol. Scaled by d so the
/// predicate coincides with is_unitary(m_of_state(phi), tol).
bool is_maximally_entangled(const EntangledState& phi, double tol = kDefaultTol);

/// gamma in m_t * conj(m_t) = gamma * 1. Throws when the product is not
/// +/- identity.
int encoding_gamma(const Encoding& e);
int encoding_gamma(const ComplexMatrix& m_t);

/// The canonical maximally entangled state Phi_T <-> m_t / sqrt(d).
EntangledState canonical_state(const Encoding& e);

/// m_t * conj(psi).
PureState time_reverse_state(const PureState& psi, const Encoding& e);
/// m_t * transpose(u) * dagger(m_t). Throws on dim mismatch or non-unitary u.
ComplexMatrix time_reverse_gate(const ComplexMatrix& u, const Encoding& e);

/// Local unitary chi with (chi (x) 1)|Phi_T> = |psi>. Throws unless psi is
/// maximally entangled.
ComplexMatrix chi_of_state(const EntangledState& psi, const Encoding& e);

struct BackwardState {
  DensityMatrix density;  // tr_1((|psi><psi| (x) 1)|phi><phi|)
  PureState vector;       // Q_phi conj(psi), unnormalized
};

/// Both forms of the state sent backward when `psi` on carrier 1 is
/// post-selected onto `phi`. The vector's squared norm is the outcome
/// probability.
BackwardState backward_state(const PureState& psi, const EntangledState& phi);

/// Expectations of (sigma_x, sigma_y, sigma_z) for a single qubit state.
Eigen::Vector3d spin_expectation(const PureState& psi);

namespace detail {
// Time-reversal machinery with complex conjugation optionally disabled; only the
// fault-injection mode of the verifier passes conjugate = false.
ComplexMatrix chi_of_state(const EntangledState& psi, const Encoding& e,
                           bool conjugate);
PureState time_reverse_state(const PureState& psi, const Encoding& e,
                             bool conjugate);
ComplexMatrix time_reverse_gate(const ComplexMatrix& u, const Encoding& e,
                                bool conjugate);
}  // namespace detail

}  // namespace tfq
