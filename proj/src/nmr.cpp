#include "tfq/nmr.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tfq::nmr {

namespace {

using std::numbers::pi;

std::size_t bit_of(std::size_t index, std::size_t spin, std::size_t n) {
  return (index >> (n - 1 - spin)) & 1U;
}

void check_spin(std::size_t spin, std::size_t n, const char* where) {
  if (spin >= n) {
    throw std::out_of_range(std::string(where) + ": spin index " +
                            std::to_string(spin) + " out of range for " +
                            std::to_string(n) + " spins");
  }
}

std::size_t spin_count(const DensityMatrix& rho, const char* where) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw std::invalid_argument(std::string(where) + ": matrix is not square");
  }
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < rho.rows()) ++n;
  if ((Eigen::Index{1} << n) != rho.rows()) {
    throw std::invalid_argument(std::string(where) +
                                ": dimension is not a power of two");
  }
  return n;
}

bool is_real_diagonal(const ComplexMatrix& h) {
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      if (r != c && h(r, c) != Complex{}) return false;
    }
    if (h(r, r).imag() != 0.0) return false;
  }
  return true;
}

DensityMatrix evolve_diagonal(const DensityMatrix& rho,
                              const Eigen::VectorXd& energies, double t) {
  DensityMatrix out(rho.rows(), rho.cols());
  for (Eigen::Index a = 0; a < rho.rows(); ++a) {
    for (Eigen::Index b = 0; b < rho.cols(); ++b) {
      out(a, b) = rho(a, b) * std::polar(1.0, -(energies(a) - energies(b)) * t);
    }
  }
  return out;
}

Eigen::VectorXd zz_energies(std::size_t n, std::size_t a, std::size_t b,
                            double coefficient) {
  Eigen::VectorXd e(std::size_t{1} << n);
  for (Eigen::Index k = 0; k < e.size(); ++k) {
    const double za = bit_of(k, a, n) ? -1.0 : 1.0;
    const double zb = bit_of(k, b, n) ? -1.0 : 1.0;
    e(k) = coefficient * za * zb;
  }
  return e;
}

ComplexMatrix rotation_matrix(Axis axis, double angle) {
  switch (axis) {
    case Axis::X:
      return gates::rx(angle);
    case Axis::Y:
      return gates::ry(angle);
    case Axis::Z:
      return gates::rz(angle);
  }
  throw std::invalid_argument("rotation: unknown axis");
}

ComplexMatrix factor_matrix(char symbol) {
  switch (symbol) {
    case 'I':
      return gates::identity(2);
    case 'X':
      return gates::pauli_x();
    case 'Y':
      return gates::pauli_y();
    case 'Z':
      return gates::pauli_z();
    case '0':
      return (gates::identity(2) + gates::pauli_z()) / 2.0;
    case '1':
      return (gates::identity(2) - gates::pauli_z()) / 2.0;
    default:
      throw std::invalid_argument(std::string("PauliProductState: invalid symbol '") +
                                  symbol + "'");
  }
}

}  // namespace

SpinSystem::SpinSystem(std::vector<double> larmor, Eigen::MatrixXd j)
    : larmor_(std::move(larmor)), j_(std::move(j)) {
  const auto n = static_cast<Eigen::Index>(larmor_.size());
  if (n == 0) throw std::invalid_argument("SpinSystem: need at least one spin");
  if (j_.rows() != n || j_.cols() != n) {
    throw std::invalid_argument("SpinSystem: coupling matrix must be " +
                                std::to_string(n) + "x" + std::to_string(n));
  }
  for (Eigen::Index a = 0; a < n; ++a) {
    if (!std::isfinite(larmor_[a])) {
      throw std::invalid_argument("SpinSystem: non-finite Larmor offset");
    }
    if (j_(a, a) != 0.0) {
      throw std::invalid_argument("SpinSystem: coupling diagonal must be zero");
    }
    for (Eigen::Index b = 0; b < n; ++b) {
      if (!std::isfinite(j_(a, b)) || j_(a, b) != j_(b, a)) {
        throw std::invalid_argument("SpinSystem: coupling matrix must be symmetric and finite");
      }
    }
  }
}

PauliProductState::PauliProductState(std::string symbols)
    : symbols_(std::move(symbols)) {
  if (symbols_.empty()) {
    throw std::invalid_argument("PauliProductState: empty label");
  }
  for (char c : symbols_) factor_matrix(c);
}

ComplexMatrix build_hamiltonian(const SpinSystem& s) {
  const std::size_t n = s.n();
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double zi = bit_of(k, i, n) ? -1.0 : 1.0;
      e += pi * s.larmor()[i] * zi;
      for (std::size_t j = 0; j < i; ++j) {
        const double zj = bit_of(k, j, n) ? -1.0 : 1.0;
        e += 0.5 * pi * s.coupling(i, j) * zi * zj;
      }
    }
    h(k, k) = e;
  }
  return h;
}

DensityMatrix evolve(const DensityMatrix& rho, const ComplexMatrix& h,
                     double t) {
  if (h.rows() != rho.rows() || h.cols() != rho.cols()) {
    throw std::invalid_argument("evolve: Hamiltonian dimension mismatch");
  }
  if (is_real_diagonal(h)) {
    return evolve_diagonal(rho, h.diagonal().real(), t);
  }
  const ComplexMatrix u = unitary_propagator(h, t);
  return u * rho * u.adjoint();
}

DensityMatrix apply_rotation(const DensityMatrix& rho,
                             const std::vector<std::size_t>& spins, Axis axis,
                             double angle) {
  const std::size_t n = spin_count(rho, "apply_rotation");
  if (!std::isfinite(angle)) {
    throw std::invalid_argument("apply_rotation: non-finite angle");
  }
  for (auto s : spins) check_spin(s, n, "apply_rotation");
  const ComplexMatrix u = rotation_matrix(axis, angle);
  DensityMatrix out = rho;
  for (auto s : spins) conjugate_one_qubit(out, n, s, u);
  return out;
}

DensityMatrix gradient_crush(const DensityMatrix& rho,
                             const std::vector<std::size_t>& spins) {
  const std::size_t n = spin_count(rho, "gradient_crush");
  if (spins.empty()) {
    throw std::invalid_argument("gradient_crush: empty spin subset");
  }
  std::size_t mask = 0;
  for (auto s : spins) {
    check_spin(s, n, "gradient_crush");
    mask |= std::size_t{1} << (n - 1 - s);
  }
  DensityMatrix out = rho;
  for (Eigen::Index a = 0; a < out.rows(); ++a) {
    for (Eigen::Index b = 0; b < out.cols(); ++b) {
      if ((static_cast<std::size_t>(a) ^ static_cast<std::size_t>(b)) & mask) {
        out(a, b) = 0.0;
      }
    }
  }
  return out;
}

DensityMatrix pseudopure_init(const PauliProductState& label) {
  std::vector<ComplexMatrix> factors;
  for (char c : label.symbols()) factors.push_back(factor_matrix(c));
  return kron_all(factors);
}

std::vector<PauliTerm> pauli_decompose(const DensityMatrix& rho, double tol) {
  const std::size_t n = spin_count(rho, "pauli_decompose");
  const std::size_t dim = std::size_t{1} << n;
  const double norm = static_cast<double>(dim);
  static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};

  std::vector<PauliTerm> terms;
  std::vector<int> code(n, 0);
  const std::size_t total = std::size_t{1} << (2 * n);
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t flip = 0;
    for (std::size_t q = 0; q < n; ++q) {
      code[q] = static_cast<int>((p >> (2 * (n - 1 - q))) & 3U);
      if (code[q] == 1 || code[q] == 2) flip |= std::size_t{1} << (n - 1 - q);
    }
    // tr(rho P) = sum_j rho(j, j ^ flip) * <j ^ flip| P |j>
    Complex tr{};
    for (std::size_t j = 0; j < dim; ++j) {
      Complex phase{1.0, 0.0};
      for (std::size_t q = 0; q < n; ++q) {
        const bool bit = bit_of(j, q, n);
        if (code[q] == 2) phase *= bit ? Complex{0, -1} : Complex{0, 1};
        if (code[q] == 3 && bit) phase = -phase;
      }
      tr += rho(j, j ^ flip) * phase;
    }
    const double c = tr.real() / norm;
    if (std::abs(c) > tol) {
      std::string label(n, 'I');
      for (std::size_t q = 0; q < n; ++q) label[q] = kLetters[code[q]];
      terms.push_back({std::move(label), c});
    }
  }
  return terms;
}

DensityMatrix apply_event(const SpinSystem& s, const DensityMatrix& rho,
                          const PulseEvent& event) {
  const std::size_t n = s.n();
  if (const auto* r = std::get_if<Rotation>(&event)) {
    return apply_rotation(rho, r->spins, r->axis, r->angle);
  }
  if (const auto* j = std::get_if<JCoupling>(&event)) {
    check_spin(j->a, n, "jcoupling");
    check_spin(j->b, n, "jcoupling");
    if (j->a == j->b) {
      throw std::invalid_argument("jcoupling: spins must differ");
    }
    const double coupling = s.coupling(j->a, j->b);
    if (coupling == 0.0) {
      throw std::invalid_argument("jcoupling: J between spins " +
                                  std::to_string(j->a) + " and " +
                                  std::to_string(j->b) + " is zero");
    }
    const double duration = j->angle / (pi * coupling);
    return evolve_diagonal(rho, zz_energies(n, j->a, j->b, 0.5 * pi * coupling),
                           duration);
  }
  if (const auto* d = std::get_if<Delay>(&event)) {
    if (!(d->seconds >= 0.0) || !std::isfinite(d->seconds)) {
      throw std::invalid_argument("delay: duration must be finite and >= 0");
    }
    return evolve(rho, build_hamiltonian(s), d->seconds);
  }
  return gradient_crush(rho, std::get<Gradient>(event).spins);
}

DensityMatrix run_sequence(const SpinSystem& s, const DensityMatrix& init,
                           const PulseSequence& seq) {
  if (init.rows() != (Eigen::Index{1} << s.n())) {
    throw std::invalid_argument("run_sequence: initial state has " +
                                std::to_string(spin_count(init, "run_sequence")) +
                                " spins, system has " + std::to_string(s.n()));
  }
  DensityMatrix rho = init;
  for (const auto& e : seq.events) rho = apply_event(s, rho, e);
  return rho;
}

DensityMatrix run_sequence(const SpinSystem& s, const PauliProductState& init,
                           const PulseSequence& seq) {
  if (init.n() != s.n()) {
    throw std::invalid_argument("run_sequence: label '" + init.symbols() +
                                "' does not match " + std::to_string(s.n()) +
                                " spins");
  }
  return run_sequence(s, pseudopure_init(init), seq);
}

Fid fid(const SpinSystem& s, const DensityMatrix& rho0, std::size_t detect,
        double duration, std::size_t points) {
  const std::size_t n = s.n();
  check_spin(detect, n, "fid");
  if (!(duration > 0.0)) throw std::invalid_argument("fid: duration must be > 0");
  if (points < 2) throw std::invalid_argument("fid: need at least 2 points");
  if (rho0.rows() != (Eigen::Index{1} << n)) {
    throw std::invalid_argument("fid: state dimension mismatch");
  }
  const Eigen::VectorXd energies = build_hamiltonian(s).diagonal().real();
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t dbit = std::size_t{1} << (n - 1 - detect);

  // X_d + i Y_d = 2 |0><1|_d, so only elements rho(a, b) with a = b | dbit
  // contribute.
  struct Coherence {
    Complex amplitude;
    double omega;
  };
  std::vector<Coherence> terms;
  for (std::size_t b = 0; b < dim; ++b) {
    if (b & dbit) continue;
    const std::size_t a = b | dbit;
    const Complex amp = 2.0 * rho0(a, b) / static_cast<double>(dim);
    if (amp != Complex{}) terms.push_back({amp, energies(b) - energies(a)});
  }

  Fid out{duration / static_cast<double>(points), {}};
  out.samples.resize(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double t = static_cast<double>(k) * out.dwell;
    Complex sum{};
    for (const auto& c : terms) sum += c.amplitude * std::polar(1.0, c.omega * t);
    out.samples[k] = sum;
  }
  return out;
}

Spectrum spectrum(const Fid& f, double line_broadening) {
  const std::size_t n = f.samples.size();
  if (n == 0 || !(f.dwell > 0.0)) {
    throw std::invalid_argument("spectrum: empty FID or non-positive dwell");
  }
  std::vector<fftw_complex> buf(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * f.dwell;
    const Complex v = f.samples[k] * std::exp(-pi * line_broadening * t);
    buf[k][0] = v.real();
    buf[k][1] = v.imag();
  }
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf.data(), buf.data(),
                                    FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  Spectrum s;
  s.dwell = f.dwell;
  s.points = n;
  s.line_broadening = line_broadening;
  s.frequencies.resize(n);
  s.intensities.resize(n);
  const std::size_t half = n / 2;
  const double df = 1.0 / (static_cast<double>(n) * f.dwell);
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t bin = (m + n - half) % n;
    s.frequencies[m] = (static_cast<double>(m) - static_cast<double>(half)) * df;
    s.intensities[m] =
        Complex{buf[bin][0], buf[bin][1]} / static_cast<double>(n);
  }
  return s;
}

double spectral_overlap(const Spectrum& a, const Spectrum& b) {
  if (a.intensities.size() != b.intensities.size() ||
      a.frequencies.size() != b.frequencies.size()) {
    throw std::invalid_argument("spectral_overlap: grids have different sizes");
  }
  for (std::size_t k = 0; k < a.frequencies.size(); ++k) {
    const double scale = std::max(1.0, std::abs(a.frequencies[k]));
    if (std::abs(a.frequencies[k] - b.frequencies[k]) > 1e-9 * scale) {
      throw std::invalid_argument("spectral_overlap: frequency grids differ");
    }
  }
  Complex inner{};
  double na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.intensities.size(); ++k) {
    inner += std::conj(a.intensities[k]) * b.intensities[k];
    na += std::norm(a.intensities[k]);
    nb += std::norm(b.intensities[k]);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::min(1.0, std::abs(inner) / std::sqrt(na * nb));
}

std::vector<Line> multiplet(const SpinSystem& s, const DensityMatrix& rho,
                            std::size_t detect) {
  const std::size_t n = s.n();
  check_spin(detect, n, "multiplet");
  if (rho.rows() != (Eigen::Index{1} << n)) {
    throw std::invalid_argument("multiplet: state dimension mismatch");
  }
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t dbit = std::size_t{1} << (n - 1 - detect);
  std::vector<Line> lines;
  for (std::size_t b = 0; b < dim; ++b) {
    if (b & dbit) continue;
    double f = s.larmor()[detect];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == detect) continue;
      const double m = bit_of(b, j, n) ? -1.0 : 1.0;
      f += 0.5 * m * s.coupling(detect, j);
    }
    lines.push_back({f, 2.0 * rho(b | dbit, b) / static_cast<double>(dim)});
  }
  return lines;
}

double detectable_amplitude(const SpinSystem& s, const DensityMatrix& rho,
                            std::size_t detect) {
  double best = 0.0;
  for (const auto& l : multiplet(s, rho, detect)) {
    best = std::max(best, std::abs(l.amplitude));
  }
  return best;
}

Spectrum rephase(Spectrum s, double phase) {
  const Complex factor = std::polar(1.0, phase);
  for (auto& v : s.intensities) v *= factor;
  return s;
}

double reference_phase(const Spectrum& s) {
  const auto it = std::max_element(
      s.intensities.begin(), s.intensities.end(),
      [](const Complex& x, const Complex& y) { return std::abs(x) < std::abs(y); });
  if (it == s.intensities.end() || *it == Complex{}) return 0.0;
  return -std::arg(*it);
}

PulseSequence acausal_sequence_before_gradient(bool with_rotation) {
  PulseSequence seq;
  // a) Bell pair between C2 and C3
  seq.events.emplace_back(Rotation{{1, 2}, Axis::Y, pi / 2});
  seq.events.emplace_back(JCoupling{1, 2, pi / 2});
  // b) couple C1 to C2
  seq.events.emplace_back(JCoupling{0, 1, pi / 2});
  // c) the optional action on C4
  if (with_rotation) seq.events.emplace_back(Rotation{{3}, Axis::Y, -pi / 2});
  // d) disentangle C3 and C4
  seq.events.emplace_back(Rotation{{2}, Axis::Y, pi / 2});
  seq.events.emplace_back(JCoupling{2, 3, pi / 2});
  seq.events.emplace_back(Rotation{{2}, Axis::Y, pi / 2});
  seq.events.emplace_back(Rotation{{3}, Axis::X, -pi / 2});
  return seq;
}

PulseSequence acausal_sequence(bool with_rotation) {
  PulseSequence seq = acausal_sequence_before_gradient(with_rotation);
  seq.events.emplace_back(Gradient{{2, 3}});
  return seq;
}

PulseSequence acausal_readout(bool with_rotation) {
  PulseSequence seq;
  // XXIZ -> XZIZ; the rotated branch YIZI needs only a receiver phase.
  if (!with_rotation) seq.events.emplace_back(Rotation{{1}, Axis::Y, -pi / 2});
  return seq;
}

double acausal_readout_phase(bool with_rotation) {
  return with_rotation ? -pi / 2 : 0.0;
}

PulseSequence initial_readout() {
  PulseSequence seq;
  seq.events.emplace_back(Rotation{{3}, Axis::Y, -pi / 2});
  return seq;
}

bool only_transverse_on(const std::vector<PauliTerm>& terms,
                        const std::vector<std::size_t>& spins) {
  for (const auto& t : terms) {
    for (auto s : spins) {
      if (s >= t.label.size()) return false;
      if (t.label[s] != 'X' && t.label[s] != 'Y') return false;
    }
  }
  return true;
}

}  // namespace tfq::nmr
