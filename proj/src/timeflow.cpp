#include "tfq/timeflow.hpp"

#include <cmath>
#include <stdexcept>

namespace tfq {

namespace {

constexpr double kEncodingTol = 1e-10;

std::size_t infer_local_dim(Eigen::Index dim) {
  const auto d = static_cast<std::size_t>(std::llround(std::sqrt(double(dim))));
  if (static_cast<Eigen::Index>(d * d) != dim || d == 0) {
    throw std::invalid_argument("EntangledState: dimension " +
                                std::to_string(dim) + " is not a square");
  }
  return d;
}

}  // namespace

Encoding::Encoding(std::string name, ComplexMatrix m_t)
    : name_(std::move(name)), m_t_(std::move(m_t)) {
  if (m_t_.rows() != m_t_.cols() || m_t_.rows() == 0) {
    throw std::invalid_argument("Encoding '" + name_ + "': M_T must be square");
  }
  if (!all_finite(m_t_) || !is_unitary(m_t_, kEncodingTol)) {
    throw std::invalid_argument("Encoding '" + name_ + "': M_T is not unitary");
  }
  gamma_ = encoding_gamma(m_t_);
}

Encoding Encoding::spin_half(Complex alpha) {
  return Encoding("spin-1/2", alpha * gates::pauli_y());
}

Encoding Encoding::photon_number(std::size_t d) {
  return Encoding("photon-number", gates::identity(d));
}

Encoding Encoding::higher_spin(std::size_t d, Complex alpha) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < d; ++k) m(k, d - 1 - k) = (k % 2 == 0) ? 1.0 : -1.0;
  return Encoding("spin-" + std::to_string(d - 1) + "/2", alpha * m);
}

EntangledState::EntangledState(PureState state, std::size_t d)
    : state_(std::move(state)), d_(d) {
  if (d_ == 0 || static_cast<std::size_t>(state_.size()) != d_ * d_) {
    throw std::invalid_argument("EntangledState: state dimension " +
                                std::to_string(state_.size()) +
                                " is not d^2 for d = " + std::to_string(d_));
  }
  if (!all_finite(state_) || std::abs(state_.norm() - 1.0) > kDefaultTol) {
    throw std::invalid_argument("EntangledState: state is not normalized");
  }
}

EntangledState::EntangledState(PureState state)
    : EntangledState(state, infer_local_dim(state.size())) {}

EntangledState bell_state(Bell which) {
  const double s = 1.0 / std::sqrt(2.0);
  PureState v = PureState::Zero(4);
  switch (which) {
    case Bell::PhiPlus:
      v << s, 0, 0, s;
      break;
    case Bell::PhiMinus:
      v << s, 0, 0, -s;
      break;
    case Bell::PsiPlus:
      v << 0, s, s, 0;
      break;
    case Bell::PsiMinus:
      v << 0, s, -s, 0;
      break;
  }
  return EntangledState(v, 2);
}

EntangledState max_entangled(std::size_t d) {
  PureState v = PureState::Zero(d * d);
  for (std::size_t k = 0; k < d; ++k) v(k * d + k) = 1.0 / std::sqrt(double(d));
  return EntangledState(v, d);
}

EntangledState pi_state(double theta) {
  PureState v = PureState::Zero(4);
  v(0) = std::cos(theta);
  v(3) = std::sin(theta);
  return EntangledState(v, 2);
}

EntangledState random_max_entangled(std::size_t d, std::mt19937_64& rng) {
  const ComplexMatrix u = random::haar_unitary(d, rng);
  PureState v = kron(u, gates::identity(d)) * max_entangled(d).state();
  return EntangledState(v / v.norm(), d);
}

ComplexMatrix q_of_state(const EntangledState& phi) {
  const std::size_t d = phi.d();
  ComplexMatrix q(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) q(i, j) = phi.state()(j * d + i);
  }
  return q;
}

EntangledState state_of_q(const ComplexMatrix& q) {
  if (q.rows() != q.cols()) {
    throw std::invalid_argument("state_of_q: matrix is not square");
  }
  const auto d = static_cast<std::size_t>(q.rows());
  PureState v(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) v(j * d + i) = q(i, j);
  }
  return EntangledState(v, d);
}

ComplexMatrix m_of_state(const EntangledState& phi) {
  return std::sqrt(static_cast<double>(phi.d())) * q_of_state(phi);
}

bool is_maximally_entangled(const EntangledState& phi, double tol) {
  const std::size_t d = phi.d();
  const PureState& v = phi.state();
  const DensityMatrix rho2 = partial_trace(v * v.adjoint(), {d, d}, {1});
  return max_abs_diff(static_cast<double>(d) * rho2, gates::identity(d)) <= tol;
}

int encoding_gamma(const ComplexMatrix& m_t) {
  const ComplexMatrix prod = m_t * m_t.conjugate();
  const ComplexMatrix id = ComplexMatrix::Identity(m_t.rows(), m_t.cols());
  if (max_abs_diff(prod, id) <= kEncodingTol) return 1;
  if (max_abs_diff(prod, -id) <= kEncodingTol) return -1;
  throw std::invalid_argument(
      "encoding_gamma: M_T conj(M_T) is not +/- identity");
}

int encoding_gamma(const Encoding& e) { return encoding_gamma(e.m_t()); }

EntangledState canonical_state(const Encoding& e) {
  return state_of_q(e.m_t() / std::sqrt(static_cast<double>(e.d())));
}

PureState time_reverse_state(const PureState& psi, const Encoding& e) {
  return detail::time_reverse_state(psi, e, true);
}

ComplexMatrix time_reverse_gate(const ComplexMatrix& u, const Encoding& e) {
  return detail::time_reverse_gate(u, e, true);
}

ComplexMatrix detail::time_reverse_gate(const ComplexMatrix& u,
                                        const Encoding& e, bool conjugate) {
  if (u.rows() != static_cast<Eigen::Index>(e.d()) || u.cols() != u.rows()) {
    throw std::invalid_argument("time_reverse_gate: gate dimension mismatch");
  }
  if (!is_unitary(u, 1e-9)) {
    throw std::invalid_argument("time_reverse_gate: gate is not unitary");
  }
  // U^T = conj(U^dagger); the faulty variant keeps U^dagger as is.
  const ComplexMatrix inner =
      conjugate ? ComplexMatrix(u.transpose()) : ComplexMatrix(u.adjoint());
  return e.m_t() * inner * e.m_t().adjoint();
}

ComplexMatrix chi_of_state(const EntangledState& psi, const Encoding& e) {
  return detail::chi_of_state(psi, e, true);
}

BackwardState backward_state(const PureState& psi, const EntangledState& phi) {
  const std::size_t d = phi.d();
  if (static_cast<std::size_t>(psi.size()) != d) {
    throw std::invalid_argument("backward_state: input dimension " +
                                std::to_string(psi.size()) +
                                " does not match local dimension " +
                                std::to_string(d));
  }
  const ComplexMatrix proj_in = kron(psi * psi.adjoint(), gates::identity(d));
  const PureState& v = phi.state();
  const DensityMatrix density =
      partial_trace(proj_in * (v * v.adjoint()), {d, d}, {1});
  return {density, q_of_state(phi) * psi.conjugate()};
}

Eigen::Vector3d spin_expectation(const PureState& psi) {
  if (psi.size() != 2) {
    throw std::invalid_argument("spin_expectation: expects a qubit state");
  }
  return {psi.dot(gates::pauli_x() * psi).real(),
          psi.dot(gates::pauli_y() * psi).real(),
          psi.dot(gates::pauli_z() * psi).real()};
}

namespace detail {

ComplexMatrix chi_of_state(const EntangledState& psi, const Encoding& e,
                           bool conjugate) {
  if (psi.d() != e.d()) {
    throw std::invalid_argument("chi_of_state: encoding dimension mismatch");
  }
  if (!is_maximally_entangled(psi, 1e-9)) {
    throw std::invalid_argument(
        "chi_of_state: state is not maximally entangled");
  }
  const ComplexMatrix m_t = conjugate ? e.m_t().conjugate() : e.m_t();
  return m_of_state(psi).transpose() * m_t;
}

PureState time_reverse_state(const PureState& psi, const Encoding& e,
                             bool conjugate) {
  if (static_cast<std::size_t>(psi.size()) != e.d()) {
    throw std::invalid_argument("time_reverse_state: dimension mismatch");
  }
  return conjugate ? PureState(e.m_t() * psi.conjugate())
                   : PureState(e.m_t() * psi);
}

}  // namespace detail

}  // namespace tfq
