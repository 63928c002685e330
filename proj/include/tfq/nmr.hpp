#pragma once

// Idealized liquid-state NMR: rotating-frame Hamiltonian, instantaneous
// pulses and J-coupling gates, gradient crushers, deviation density matrices
// written as product-operator labels, FID and spectrum synthesis.
//
// Spins are indexed from 0 in this API. Rotation sign convention:
// R_a(theta) rho = exp(-i theta sigma_a / 2) rho exp(+i theta sigma_a / 2),
// so R_y(pi/2) takes Z to X and R_y(-pi/2) takes X to Z.

#include "tfq/linalg.hpp"

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tfq::nmr {

class SpinSystem {
 public:
  /// larmor: rotating-frame offsets in Hz; j: symmetric coupling matrix in
  /// Hz with zero diagonal. Throws on inconsistent sizes or asymmetry.
  SpinSystem(std::vector<double> larmor, Eigen::MatrixXd j);

  std::size_t n() const { return larmor_.size(); }
  const std::vector<double>& larmor() const { return larmor_; }
  const Eigen::MatrixXd& j() const { return j_; }
  double coupling(std::size_t a, std::size_t b) const { return j_(a, b); }

 private:
  std::vector<double> larmor_;
  Eigen::MatrixXd j_;
};

/// Product-operator label over {I, X, Y, Z, 0, 1}; 0 and 1 stand for
/// (1 + Z)/2 and (1 - Z)/2.
class PauliProductState {
 public:
  explicit PauliProductState(std::string symbols);
  const std::string& symbols() const { return symbols_; }
  std::size_t n() const { return symbols_.size(); }

 private:
  std::string symbols_;
};

enum class Axis { X, Y, Z };

struct Rotation {
  std::vector<std::size_t> spins;
  Axis axis;
  double angle;  // rad; negative angles rotate about -axis
};

/// exp(-i angle/2 Z_a Z_b), realised as free evolution under the coupling
/// term alone for angle / (pi J_ab) seconds.
struct JCoupling {
  std::size_t a;
  std::size_t b;
  double angle;
};

struct Delay {
  double seconds;
};

struct Gradient {
  std::vector<std::size_t> spins;
};

using PulseEvent = std::variant<Rotation, JCoupling, Delay, Gradient>;

struct PulseSequence {
  std::vector<PulseEvent> events;
};

struct PauliTerm {
  std::string label;  // letters I, X, Y, Z only
  double coefficient;
};

struct Fid {
  double dwell;  // s
  std::vector<Complex> samples;
};

struct Spectrum {
  std::vector<double> frequencies;  // Hz, ascending, uniform
  std::vector<Complex> intensities;
  double dwell;
  std::size_t points;
  double line_broadening;  // Hz
};

/// One line of a detected spin's multiplet.
struct Line {
  double frequency;  // Hz
  Complex amplitude;
};

ComplexMatrix build_hamiltonian(const SpinSystem& s);

/// exp(-i h t) rho exp(i h t). Throws when h is not Hermitian.
DensityMatrix evolve(const DensityMatrix& rho, const ComplexMatrix& h, double t);

DensityMatrix apply_rotation(const DensityMatrix& rho,
                             const std::vector<std::size_t>& spins, Axis axis,
                             double angle);

/// Removes every element off-diagonal in the computational basis of any of
/// the listed spins.
DensityMatrix gradient_crush(const DensityMatrix& rho,
                             const std::vector<std::size_t>& spins);

DensityMatrix pseudopure_init(const PauliProductState& label);

/// Coefficients tr(rho P) / 2^n over the Pauli product basis, in
/// lexicographic order of I < X < Y < Z, dropping |c| <= tol.
std::vector<PauliTerm> pauli_decompose(const DensityMatrix& rho,
                                       double tol = 1e-12);

DensityMatrix apply_event(const SpinSystem& s, const DensityMatrix& rho,
                          const PulseEvent& event);
DensityMatrix run_sequence(const SpinSystem& s, const DensityMatrix& init,
                           const PulseSequence& seq);
DensityMatrix run_sequence(const SpinSystem& s, const PauliProductState& init,
                           const PulseSequence& seq);

/// signal(t_k) = tr(rho(t_k) (X_d + i Y_d)) / 2^n, t_k = k * duration/points.
Fid fid(const SpinSystem& s, const DensityMatrix& rho0, std::size_t detect,
        double duration, std::size_t points);

/// Exponentially apodized DFT; frequency axis (k - N/2) / (N dwell).
Spectrum spectrum(const Fid& f, double line_broadening);

/// |<a, b>| / (|a| |b|). Throws on grid mismatch; 0 when either is zero.
double spectral_overlap(const Spectrum& a, const Spectrum& b);

/// Analytic multiplet of `detect`: one line per computational configuration
/// of the other spins, at nu_d + sum_j m_j J_dj / 2 with m_j = +/-1.
std::vector<Line> multiplet(const SpinSystem& s, const DensityMatrix& rho,
                            std::size_t detect);
/// Largest line magnitude of the detected spin.
double detectable_amplitude(const SpinSystem& s, const DensityMatrix& rho,
                            std::size_t detect);

/// Multiplies the spectrum by e^{i phase}.
Spectrum rephase(Spectrum s, double phase);
/// Zero-order phase that makes the largest-magnitude point real positive.
double reference_phase(const Spectrum& s);

// ---------------------------------------------------------------------------
// The four-spin acausality experiment. Spin k here is carbon C(k+1).

/// Bell-pair coupling C2-C3, coupling C1-C2, optional
/// R_y(-pi/2) on C4, disentangling C3-C4 and the C3,C4 crusher.
PulseSequence acausal_sequence(bool with_rotation);
/// The same events up to, but excluding, the gradient.
PulseSequence acausal_sequence_before_gradient(bool with_rotation);
/// Readout pulses that make the final state observable on C1.
PulseSequence acausal_readout(bool with_rotation);
/// Receiver phase applied to the readout spectrum: -pi/2 turns the YIZI
/// branch into absorptive lines, 0 otherwise.
double acausal_readout_phase(bool with_rotation);
/// Rotates C4 of the initial state back along z.
PulseSequence initial_readout();

inline const char* kAcausalInitialLabel = "X00X";
inline const char* kAcausalNoRotationFinal = "XXIZ";
inline const char* kAcausalRotationFinal = "YIZI";

/// True when every term carries X or Y on each of `spins`.
bool only_transverse_on(const std::vector<PauliTerm>& terms,
                        const std::vector<std::size_t>& spins);

}  // namespace tfq::nmr
