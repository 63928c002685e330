#pragma once

// Dense complex linear algebra for small Hilbert spaces.
//
// Basis ordering: carriers are indexed left to right with carrier 0 the most
// significant digit, so |c0 c1 ... c(n-1)> sits at index sum_i c_i * prod_{k>i} d_k.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace tfq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using PureState = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kPositivityTol = 1e-9;

/// Builds a matrix from row-major entries. Throws on size mismatch or
/// non-finite values.
ComplexMatrix make_matrix(std::size_t rows, std::size_t cols,
                          const std::vector<Complex>& row_major);
PureState make_state(const std::vector<Complex>& amplitudes);

bool all_finite(const ComplexMatrix& a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors);
PureState kron(const PureState& a, const PureState& b);

ComplexMatrix dagger(const ComplexMatrix& a);
ComplexMatrix transpose(const ComplexMatrix& a);
ComplexMatrix conjugate(const ComplexMatrix& a);

/// Reduced density matrix over the carriers listed in `keep` (any order; the
/// result is ordered by ascending carrier index). Throws when the product of
/// `dims` differs from rho's dimension or an index is out of range.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep);

/// (<bra|_S (x) 1) state: contracts the carriers in `carriers` against `bra`
/// and returns the vector on the remaining carriers. Both `bra` and the result
/// are indexed with their carriers in ascending order, whatever the listed order.
PureState contract(const PureState& state, const std::vector<std::size_t>& dims,
                   const std::vector<std::size_t>& carriers,
                   const PureState& bra);

/// Inverse of contract for product states: places `on_carriers` on the listed
/// carriers and `on_rest` on the remaining ones.
PureState embed(const PureState& on_carriers, const PureState& on_rest,
                const std::vector<std::size_t>& dims,
                const std::vector<std::size_t>& carriers);

/// ||a a^dagger - 1||_max <= tol. Throws on non-square input.
bool is_unitary(const ComplexMatrix& a, double tol = kDefaultTol);
bool is_hermitian(const ComplexMatrix& a, double tol = kDefaultTol);
/// Smallest eigenvalue >= -tol; assumes a Hermitian argument.
bool is_positive_semidefinite(const ComplexMatrix& a,
                              double tol = kPositivityTol);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// |<x|y>| >= (1 - tol) ||x|| ||y||. Throws on dim mismatch or zero vectors.
bool equal_up_to_global_phase(const PureState& x, const PureState& y,
                              double tol = kDefaultTol);
/// max_i |x_i - e^{i phi} y_i| with phi = arg<y|x> chosen to align y onto x.
double phase_aligned_distance(const PureState& x, const PureState& y);

/// exp(-i h t) for Hermitian h.
ComplexMatrix unitary_propagator(const ComplexMatrix& h, double t);

/// Applies a 2x2 unitary to one qubit of an n-qubit state in place.
void apply_one_qubit(PureState& state, std::size_t n_qubits,
                     std::size_t qubit, const ComplexMatrix& u);
/// Applies a 4x4 unitary to the ordered qubit pair (first, second).
void apply_two_qubit(PureState& state, std::size_t n_qubits,
                     std::size_t first, std::size_t second,
                     const ComplexMatrix& u);
/// rho -> u rho u^dagger for a 2x2 u acting on one qubit.
void conjugate_one_qubit(DensityMatrix& rho, std::size_t n_qubits,
                         std::size_t qubit, const ComplexMatrix& u);

namespace gates {
ComplexMatrix identity(std::size_t d);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();
ComplexMatrix phase_s();
ComplexMatrix rx(double theta);
ComplexMatrix ry(double theta);
ComplexMatrix rz(double theta);
/// Qudit shift X|k> = |k+1 mod d> and clock Z|k> = w^k |k>.
ComplexMatrix shift(std::size_t d);
ComplexMatrix clock(std::size_t d);
ComplexMatrix cnot();
ComplexMatrix cphase(double phi);
}  // namespace gates

namespace random {
/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
ComplexMatrix haar_unitary(std::size_t d, std::mt19937_64& rng);
/// Uniformly distributed normalized state.
PureState haar_state(std::size_t d, std::mt19937_64& rng);
}  // namespace random

}  // namespace tfq
