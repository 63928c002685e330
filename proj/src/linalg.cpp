#include "tfq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tfq {

namespace {

std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t p = 1;
  for (auto d : dims) p *= d;
  return p;
}

// Splits every full index into (index over `chosen` carriers, index over the
// rest), both in ascending carrier order.
void split_indices(const std::vector<std::size_t>& dims,
                   const std::vector<bool>& chosen,
                   std::vector<std::size_t>& chosen_idx,
                   std::vector<std::size_t>& rest_idx) {
  const std::size_t total = product(dims);
  chosen_idx.assign(total, 0);
  rest_idx.assign(total, 0);
  std::vector<std::size_t> digits(dims.size(), 0);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t c = 0, r = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (chosen[k]) {
        c = c * dims[k] + digits[k];
      } else {
        r = r * dims[k] + digits[k];
      }
    }
    chosen_idx[i] = c;
    rest_idx[i] = r;
    // odometer increment, last carrier fastest
    for (std::size_t k = dims.size(); k-- > 0;) {
      if (++digits[k] < dims[k]) break;
      digits[k] = 0;
    }
  }
}

std::vector<bool> carrier_mask(const std::vector<std::size_t>& dims,
                               const std::vector<std::size_t>& carriers) {
  std::vector<bool> mask(dims.size(), false);
  for (auto c : carriers) {
    if (c >= dims.size()) {
      throw std::out_of_range("carrier index " + std::to_string(c) +
                              " out of range for " +
                              std::to_string(dims.size()) + " carriers");
    }
    if (mask[c]) {
      throw std::invalid_argument("carrier index " + std::to_string(c) +
                                  " listed twice");
    }
    mask[c] = true;
  }
  return mask;
}

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix is not square");
  }
}

}  // namespace

ComplexMatrix make_matrix(std::size_t rows, std::size_t cols,
                          const std::vector<Complex>& row_major) {
  if (row_major.size() != rows * cols) {
    throw std::invalid_argument("make_matrix: expected " +
                                std::to_string(rows * cols) + " entries, got " +
                                std::to_string(row_major.size()));
  }
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row_major[r * cols + c];
  }
  if (!all_finite(m)) {
    throw std::invalid_argument("make_matrix: non-finite entry");
  }
  return m;
}

PureState make_state(const std::vector<Complex>& amplitudes) {
  PureState v(amplitudes.size());
  for (std::size_t i = 0; i < amplitudes.size(); ++i) v(i) = amplitudes[i];
  if (!all_finite(v)) {
    throw std::invalid_argument("make_state: non-finite amplitude");
  }
  return v;
}

bool all_finite(const ComplexMatrix& a) {
  return std::all_of(a.data(), a.data() + a.size(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

PureState kron(const PureState& a, const PureState& b) {
  PureState out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

ComplexMatrix dagger(const ComplexMatrix& a) { return a.adjoint(); }
ComplexMatrix transpose(const ComplexMatrix& a) { return a.transpose(); }
ComplexMatrix conjugate(const ComplexMatrix& a) { return a.conjugate(); }

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep) {
  require_square(rho, "partial_trace");
  if (product(dims) != static_cast<std::size_t>(rho.rows())) {
    throw std::invalid_argument("partial_trace: product of dims " +
                                std::to_string(product(dims)) +
                                " does not match matrix dimension " +
                                std::to_string(rho.rows()));
  }
  const auto mask = carrier_mask(dims, keep);
  std::size_t kept_dim = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (mask[k]) kept_dim *= dims[k];
  }
  std::vector<std::size_t> kept, traced;
  split_indices(dims, mask, kept, traced);

  DensityMatrix out = DensityMatrix::Zero(kept_dim, kept_dim);
  const auto total = static_cast<Eigen::Index>(kept.size());
  for (Eigen::Index i = 0; i < total; ++i) {
    for (Eigen::Index j = 0; j < total; ++j) {
      if (traced[i] == traced[j]) out(kept[i], kept[j]) += rho(i, j);
    }
  }
  return out;
}

PureState contract(const PureState& state, const std::vector<std::size_t>& dims,
                   const std::vector<std::size_t>& carriers,
                   const PureState& bra) {
  if (product(dims) != static_cast<std::size_t>(state.size())) {
    throw std::invalid_argument("contract: dims do not match state dimension");
  }
  const auto mask = carrier_mask(dims, carriers);
  std::size_t chosen_dim = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (mask[k]) chosen_dim *= dims[k];
  }
  if (static_cast<std::size_t>(bra.size()) != chosen_dim) {
    throw std::invalid_argument("contract: bra dimension mismatch");
  }
  std::vector<std::size_t> chosen, rest;
  split_indices(dims, mask, chosen, rest);
  PureState out = PureState::Zero(product(dims) / chosen_dim);
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    out(rest[i]) += std::conj(bra(chosen[i])) * state(i);
  }
  return out;
}

PureState embed(const PureState& on_carriers, const PureState& on_rest,
                const std::vector<std::size_t>& dims,
                const std::vector<std::size_t>& carriers) {
  const auto mask = carrier_mask(dims, carriers);
  std::vector<std::size_t> chosen, rest;
  split_indices(dims, mask, chosen, rest);
  if (static_cast<std::size_t>(on_carriers.size() * on_rest.size()) !=
      product(dims)) {
    throw std::invalid_argument("embed: dimension mismatch");
  }
  PureState out(chosen.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    out(i) = on_carriers(chosen[i]) * on_rest(rest[i]);
  }
  return out;
}

bool is_unitary(const ComplexMatrix& a, double tol) {
  require_square(a, "is_unitary");
  const ComplexMatrix id = ComplexMatrix::Identity(a.rows(), a.cols());
  return max_abs_diff(a * a.adjoint(), id) <= tol;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  require_square(a, "is_hermitian");
  return max_abs_diff(a, a.adjoint()) <= tol;
}

bool is_positive_semidefinite(const ComplexMatrix& a, double tol) {
  require_square(a, "is_positive_semidefinite");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool equal_up_to_global_phase(const PureState& x, const PureState& y,
                              double tol) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("equal_up_to_global_phase: dim mismatch");
  }
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0) {
    throw std::invalid_argument("equal_up_to_global_phase: zero vector");
  }
  return std::abs(x.dot(y)) >= (1.0 - tol) * nx * ny;
}

double phase_aligned_distance(const PureState& x, const PureState& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("phase_aligned_distance: dim mismatch");
  }
  const Complex overlap = y.dot(x);  // <y|x>
  const Complex phase =
      std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
  if (x.size() == 0) return 0.0;
  return (x - phase * y).cwiseAbs().maxCoeff();
}

ComplexMatrix unitary_propagator(const ComplexMatrix& h, double t) {
  require_square(h, "unitary_propagator");
  if (!is_hermitian(h, 1e-9 * std::max(1.0, h.cwiseAbs().maxCoeff()))) {
    throw std::invalid_argument("unitary_propagator: Hamiltonian is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<Complex>() * Complex{0.0, -t}).array().exp();
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

void apply_one_qubit(PureState& state, std::size_t n_qubits,
                     std::size_t qubit, const ComplexMatrix& u) {
  if (qubit >= n_qubits) throw std::out_of_range("apply_one_qubit: qubit");
  if (state.size() != (Eigen::Index{1} << n_qubits) || u.rows() != 2 ||
      u.cols() != 2) {
    throw std::invalid_argument("apply_one_qubit: dimension mismatch");
  }
  const Eigen::Index stride = Eigen::Index{1} << (n_qubits - 1 - qubit);
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    if (i & stride) continue;
    const Complex a0 = state(i);
    const Complex a1 = state(i | stride);
    state(i) = u(0, 0) * a0 + u(0, 1) * a1;
    state(i | stride) = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

void apply_two_qubit(PureState& state, std::size_t n_qubits,
                     std::size_t first, std::size_t second,
                     const ComplexMatrix& u) {
  if (first == second) {
    throw std::invalid_argument("apply_two_qubit: qubits must differ");
  }
  if (first >= n_qubits || second >= n_qubits) {
    throw std::out_of_range("apply_two_qubit: qubit out of range");
  }
  if (state.size() != (Eigen::Index{1} << n_qubits) || u.rows() != 4 ||
      u.cols() != 4) {
    throw std::invalid_argument("apply_two_qubit: dimension mismatch");
  }
  const Eigen::Index sf = Eigen::Index{1} << (n_qubits - 1 - first);
  const Eigen::Index ss = Eigen::Index{1} << (n_qubits - 1 - second);
  Eigen::Vector4cd local;
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    if ((i & sf) || (i & ss)) continue;
    const Eigen::Index idx[4] = {i, i | ss, i | sf, i | sf | ss};
    for (int k = 0; k < 4; ++k) local(k) = state(idx[k]);
    const Eigen::Vector4cd out = u * local;
    for (int k = 0; k < 4; ++k) state(idx[k]) = out(k);
  }
}

void conjugate_one_qubit(DensityMatrix& rho, std::size_t n_qubits,
                         std::size_t qubit, const ComplexMatrix& u) {
  const ComplexMatrix uc = u.conjugate();
  PureState line;
  for (Eigen::Index c = 0; c < rho.cols(); ++c) {
    line = rho.col(c);
    apply_one_qubit(line, n_qubits, qubit, u);
    rho.col(c) = line;
  }
  for (Eigen::Index r = 0; r < rho.rows(); ++r) {
    line = rho.row(r).transpose();
    apply_one_qubit(line, n_qubits, qubit, uc);
    rho.row(r) = line.transpose();
  }
}

namespace gates {

ComplexMatrix identity(std::size_t d) { return ComplexMatrix::Identity(d, d); }

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex{0, -1}, Complex{0, 1}, 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix hadamard() {
  ComplexMatrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

ComplexMatrix phase_s() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, Complex{0, 1};
  return m;
}

ComplexMatrix rx(double theta) {
  return std::cos(theta / 2) * identity(2) -
         Complex{0, 1} * std::sin(theta / 2) * pauli_x();
}

ComplexMatrix ry(double theta) {
  return std::cos(theta / 2) * identity(2) -
         Complex{0, 1} * std::sin(theta / 2) * pauli_y();
}

ComplexMatrix rz(double theta) {
  return std::cos(theta / 2) * identity(2) -
         Complex{0, 1} * std::sin(theta / 2) * pauli_z();
}

ComplexMatrix shift(std::size_t d) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < d; ++k) m((k + 1) % d, k) = 1.0;
  return m;
}

ComplexMatrix clock(std::size_t d) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    m(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) /
                                  static_cast<double>(d));
  }
  return m;
}

ComplexMatrix cnot() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

ComplexMatrix cphase(double phi) {
  ComplexMatrix m = ComplexMatrix::Identity(4, 4);
  m(3, 3) = std::polar(1.0, phi);
  return m;
}

}  // namespace gates

namespace random {

ComplexMatrix haar_unitary(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix z(d, d);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z.data()[i] = Complex{normal(rng), normal(rng)};
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t k = 0; k < d; ++k) {
    const Complex rkk = r(k, k);
    q.col(k) *= std::abs(rkk) > 0.0 ? rkk / std::abs(rkk) : Complex{1.0, 0.0};
  }
  return q;
}

PureState haar_state(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  PureState v(d);
  for (std::size_t i = 0; i < d; ++i) v(i) = Complex{normal(rng), normal(rng)};
  return v / v.norm();
}

}  // namespace random

}  // namespace tfq
