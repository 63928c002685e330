#include "support.hpp"
#include "tfq/nmr.hpp"

#include <doctest.h>

#include <numbers>

using namespace tfq;
using namespace tfq::nmr;
using namespace testing;

namespace {

const double pi = std::numbers::pi;

SpinSystem single(double nu) { return SpinSystem({nu}, Eigen::MatrixXd::Zero(1, 1)); }

SpinSystem pair(double nu1, double nu2, double j) {
  Eigen::MatrixXd m(2, 2);
  m << 0, j, j, 0;
  return SpinSystem({nu1, nu2}, m);
}

SpinSystem four_spins(const std::vector<double>& nu, const std::vector<double>& upper) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4, 4);
  std::size_t k = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) j(a, b) = j(b, a) = upper[k++];
  return SpinSystem(nu, j);
}

std::vector<SpinSystem> generic_systems() {
  return {four_spins({2450.0, -1830.5, 620.3, -2980.7}, {72.4, 1.4, 7.0, 69.7, 1.6, 41.6}),
          four_spins({-120.0, 815.2, 3311.9, -47.5}, {55.0, -3.2, 9.9, 80.1, 0.0, 33.3}),
          four_spins({10.0, 20.0, 30.0, 40.0}, {12.5, 0.7, 4.4, 140.0, 2.2, 19.0}),
          four_spins({0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0, 1.0, 1.0})};
}

ComplexMatrix pauli(char c) {
  switch (c) {
    case 'X': return gates::pauli_x();
    case 'Y': return gates::pauli_y();
    case 'Z': return gates::pauli_z();
    default: return gates::identity(2);
  }
}

ComplexMatrix pauli_string(const std::string& s) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (char c : s) out = kron_by_index(out, pauli(c));
  return out;
}

ComplexMatrix z_on(std::size_t spin, std::size_t n) {
  std::string s(n, 'I');
  s[spin] = 'Z';
  return pauli_string(s);
}

// tr(rho(t) (X_d + i Y_d)) / 2^n with rho(t) from evolve()
Complex signal_by_evolution(const SpinSystem& s, const DensityMatrix& rho, std::size_t d, double t) {
  const std::size_t n = s.n();
  std::string xs(n, 'I'), ys(n, 'I');
  xs[d] = 'X';
  ys[d] = 'Y';
  const ComplexMatrix detect = pauli_string(xs) + Complex{0, 1} * pauli_string(ys);
  return (evolve(rho, build_hamiltonian(s), t) * detect).trace() / double(1 << n);
}

}  // namespace

TEST_CASE("spin system validation") {
  CHECK_THROWS_AS(SpinSystem({}, Eigen::MatrixXd(0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(SpinSystem({1.0, 2.0}, Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(SpinSystem({1.0, 2.0}, asym), std::invalid_argument);
  Eigen::MatrixXd diag(2, 2);
  diag << 1, 0, 0, 0;
  CHECK_THROWS_AS(SpinSystem({1.0, 2.0}, diag), std::invalid_argument);
  CHECK(pair(1.0, 2.0, 3.0).coupling(1, 0) == 3.0);
}

TEST_CASE("Hamiltonian") {
  const ComplexMatrix h1 = build_hamiltonian(single(100.0));
  CHECK(h1(0, 0).real() == doctest::Approx(pi * 100));
  CHECK(h1(1, 1).real() == doctest::Approx(-pi * 100));
  CHECK(h1(0, 1) == Complex{});

  const ComplexMatrix h2 = build_hamiltonian(pair(0.0, 0.0, 50.0));
  const double c = pi / 2 * 50;
  CHECK(max_abs_diff(h2.diagonal(), make_state({c, -c, -c, c})) < 1e-12);

  for (const auto& s : generic_systems()) {
    ComplexMatrix expected = ComplexMatrix::Zero(16, 16);
    for (std::size_t i = 0; i < 4; ++i) {
      expected += pi * s.larmor()[i] * z_on(i, 4);
      for (std::size_t j = 0; j < i; ++j) expected += pi / 2 * s.coupling(i, j) * z_on(i, 4) * z_on(j, 4);
    }
    const ComplexMatrix h = build_hamiltonian(s);
    CHECK(max_abs_diff(h, expected) < 1e-9);
    for (std::size_t i = 0; i < 4; ++i) {
      const ComplexMatrix z = z_on(i, 4);
      CHECK(max_abs_diff(h * z, z * h) < 1e-12);
    }
  }
}

TEST_CASE("free evolution") {
  const DensityMatrix x = gates::pauli_x();
  CHECK(max_abs_diff(evolve(x, build_hamiltonian(single(100.0)), 0.0), x) == 0.0);
  for (double t : {0.0007, 0.0025, 0.013}) {
    const double phi = 2 * pi * 100 * t;
    const ComplexMatrix expected = std::cos(phi) * gates::pauli_x() + std::sin(phi) * gates::pauli_y();
    CHECK(max_abs_diff(evolve(x, build_hamiltonian(single(100.0)), t), expected) < 1e-12);
  }
  CHECK(max_abs_diff(evolve(x, build_hamiltonian(single(100.0)), 0.0025), gates::pauli_y()) < 1e-12);

  // X (x) |0><0| under J ZZ for 1/(2J): the |0> branch turns X into Y
  const DensityMatrix up = (gates::identity(2) + gates::pauli_z()) / 2.0;
  const DensityMatrix rho = kron(gates::pauli_x(), up);
  const DensityMatrix out = evolve(rho, build_hamiltonian(pair(0.0, 0.0, 50.0)), 1.0 / 100.0);
  CHECK(max_abs_diff(out, kron(gates::pauli_y(), up)) < 1e-12);
}

TEST_CASE("evolution with a dense Hamiltonian") {
  auto rng = rng_for(40);
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix h = random_hermitian(4, rng);
    const DensityMatrix rho = random_hermitian(4, rng);
    const ComplexMatrix u = expm_taylor(h, 0.37);
    const DensityMatrix out = evolve(rho, h, 0.37);
    CHECK(max_abs_diff(out, u * rho * u.adjoint()) < 1e-10);
    CHECK(is_hermitian(out, 1e-12));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> before(rho), after(out);
    CHECK((before.eigenvalues() - after.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(evolve(gates::pauli_x(), make_matrix(2, 2, {0.0, 1.0, 0.0, 0.0}), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(evolve(gates::pauli_x(), ComplexMatrix::Identity(4, 4), 1.0), std::invalid_argument);
}

TEST_CASE("rotations") {
  const DensityMatrix z = gates::pauli_z(), x = gates::pauli_x(), y = gates::pauli_y();
  CHECK(max_abs_diff(apply_rotation(z, {0}, Axis::Y, pi / 2), x) < 1e-15);
  CHECK(max_abs_diff(apply_rotation(x, {0}, Axis::Y, -pi / 2), z) < 1e-15);
  CHECK(max_abs_diff(apply_rotation(z, {0}, Axis::X, pi / 2), -y) < 1e-15);
  CHECK(max_abs_diff(apply_rotation(x, {0}, Axis::Z, pi / 2), y) < 1e-15);
  auto rng = rng_for(41);
  const DensityMatrix rho = random_density(8, rng);
  CHECK(max_abs_diff(apply_rotation(rho, {0, 2}, Axis::X, 2 * pi), rho) < 1e-14);
  // each listed spin gets the same rotation
  const DensityMatrix both = apply_rotation(kron(z, z), {0, 1}, Axis::Y, pi / 2);
  CHECK(max_abs_diff(both, kron(x, x)) < 1e-15);
  CHECK_THROWS_AS(apply_rotation(rho, {3}, Axis::X, 1.0), std::out_of_range);
  CHECK_THROWS_AS(apply_rotation(rho, {0}, Axis::X, std::nan("")), std::invalid_argument);
}

TEST_CASE("J-coupling gate is a ZZ phase whatever the coupling strength") {
  const DensityMatrix xi = kron(gates::pauli_x(), gates::identity(2));
  const DensityMatrix yz = kron(gates::pauli_y(), gates::pauli_z());
  for (double j : {50.0, 7.3, -12.0}) {
    const SpinSystem s = pair(100.0, -40.0, j);
    CHECK(max_abs_diff(apply_event(s, xi, JCoupling{0, 1, pi / 2}), yz) < 1e-12);
    const double theta = 0.3;
    const ComplexMatrix u = expm_taylor(kron(gates::pauli_z(), gates::pauli_z()), theta / 2);
    auto rng = rng_for(42);
    const DensityMatrix rho = random_density(4, rng);
    CHECK(max_abs_diff(apply_event(s, rho, JCoupling{1, 0, theta}), u * rho * u.adjoint()) < 1e-12);
  }
  const SpinSystem uncoupled = pair(1.0, 2.0, 0.0);
  CHECK_THROWS_AS(apply_event(uncoupled, xi, JCoupling{0, 1, pi / 2}), std::invalid_argument);
  CHECK_THROWS_AS(apply_event(pair(1, 2, 3), xi, JCoupling{0, 0, pi / 2}), std::invalid_argument);
  CHECK_THROWS_AS(apply_event(pair(1, 2, 3), xi, JCoupling{0, 2, pi / 2}), std::out_of_range);
}

TEST_CASE("delays evolve under the full Hamiltonian") {
  const SpinSystem s = pair(100.0, -40.0, 12.0);
  auto rng = rng_for(43);
  const DensityMatrix rho = random_density(4, rng);
  const ComplexMatrix u = expm_taylor(build_hamiltonian(s), 0.0031);
  CHECK(max_abs_diff(apply_event(s, rho, Delay{0.0031}), u * rho * u.adjoint()) < 1e-10);
  CHECK_THROWS_AS(apply_event(s, rho, Delay{-1.0}), std::invalid_argument);
}

TEST_CASE("gradient crusher") {
  CHECK(max_abs_diff(gradient_crush(gates::pauli_x(), {0}), ComplexMatrix::Zero(2, 2)) == 0.0);
  CHECK(max_abs_diff(gradient_crush(gates::pauli_z(), {0}), gates::pauli_z()) == 0.0);
  auto rng = rng_for(44);
  const DensityMatrix rho = random_density(16, rng);
  const DensityMatrix once = gradient_crush(rho, {2, 3});
  CHECK(max_abs_diff(gradient_crush(once, {2, 3}), once) == 0.0);
  CHECK(std::abs(once.trace() - rho.trace()) < 1e-15);
  // sum over computational projectors of spins 3 and 4
  ComplexMatrix expected = ComplexMatrix::Zero(16, 16);
  for (std::size_t b = 0; b < 4; ++b) {
    ComplexMatrix p = ComplexMatrix::Zero(4, 4);
    p(b, b) = 1.0;
    const ComplexMatrix full = kron_by_index(ComplexMatrix::Identity(4, 4), p);
    expected += full * rho * full;
  }
  CHECK(max_abs_diff(once, expected) < 1e-15);
  CHECK_THROWS_AS(gradient_crush(rho, {}), std::invalid_argument);
  CHECK_THROWS_AS(gradient_crush(rho, {4}), std::out_of_range);
}

TEST_CASE("product-operator labels") {
  const ComplexMatrix id = gates::identity(2), x = gates::pauli_x(), z = gates::pauli_z();
  const ComplexMatrix expected = 0.25 * kron_all({x, id + z, id + z, x});
  CHECK(max_abs_diff(pseudopure_init(PauliProductState("X00X")), expected) < 1e-15);
  CHECK(max_abs_diff(pseudopure_init(PauliProductState("Z")), z) == 0.0);
  const ComplexMatrix p = pseudopure_init(PauliProductState("00"));
  CHECK(max_abs_diff(p * p, p) < 1e-15);
  CHECK(std::abs(p.trace() - 1.0) < 1e-15);
  CHECK(max_abs_diff(pseudopure_init(PauliProductState("1")), (id - z) / 2.0) == 0.0);
  CHECK_THROWS_AS(PauliProductState("X2"), std::invalid_argument);
  CHECK_THROWS_AS(PauliProductState(""), std::invalid_argument);
}

TEST_CASE("Pauli decomposition") {
  const auto z = pauli_decompose(gates::pauli_z());
  REQUIRE(z.size() == 1);
  CHECK(z[0].label == "Z");
  CHECK(z[0].coefficient == doctest::Approx(1.0));

  const auto terms = pauli_decompose(pseudopure_init(PauliProductState("X00X")));
  REQUIRE(terms.size() == 4);
  const std::vector<std::string> labels{"XIIX", "XIZX", "XZIX", "XZZX"};
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(terms[k].label == labels[k]);
    CHECK(terms[k].coefficient == doctest::Approx(0.25));
  }

  // coefficients agree with tr(rho P) / 2^n and rebuild the matrix
  auto rng = rng_for(45);
  const std::string alphabet = "IXYZ01";
  for (int t = 0; t < 20; ++t) {
    std::string label;
    for (int k = 0; k < 3; ++k) label += alphabet[rng() % alphabet.size()];
    const DensityMatrix rho = pseudopure_init(PauliProductState(label)) + random_hermitian(8, rng);
    ComplexMatrix rebuilt = ComplexMatrix::Zero(8, 8);
    for (const auto& term : pauli_decompose(rho)) {
      const ComplexMatrix p = pauli_string(term.label);
      CHECK(term.coefficient == doctest::Approx((rho * p).trace().real() / 8.0).epsilon(1e-12));
      rebuilt += term.coefficient * p;
    }
    CHECK(max_abs_diff(rebuilt, rho) < 1e-12);
  }
}

TEST_CASE("empty sequences leave the initial state alone") {
  const auto s = generic_systems()[0];
  CHECK(max_abs_diff(run_sequence(s, PauliProductState("X00X"), PulseSequence{}),
                     pseudopure_init(PauliProductState("X00X"))) == 0.0);
  CHECK_THROWS_AS(run_sequence(s, PauliProductState("X0X"), PulseSequence{}), std::invalid_argument);
}

TEST_CASE("acausality sequence final states") {
  for (const auto& s : generic_systems()) {
    for (bool rot : {false, true}) {
      const auto terms = pauli_decompose(
          run_sequence(s, PauliProductState(kAcausalInitialLabel), acausal_sequence(rot)), 1e-12);
      REQUIRE(terms.size() == 1);
      CHECK(terms[0].label == (rot ? kAcausalRotationFinal : kAcausalNoRotationFinal));
      CHECK(terms[0].coefficient == doctest::Approx(0.25).epsilon(1e-12));
    }
  }
}

TEST_CASE("acausality sequence before the crusher") {
  const auto s = generic_systems()[1];
  const DensityMatrix init = pseudopure_init(PauliProductState(kAcausalInitialLabel));
  for (bool rot : {false, true}) {
    const DensityMatrix before = run_sequence(s, init, acausal_sequence_before_gradient(rot));
    // the crusher keeps Z-diagonal terms on C3 and C4 and nothing else
    const auto surviving = pauli_decompose(gradient_crush(before, {2, 3}));
    CHECK(only_transverse_on(surviving, {0, 1}) == !rot);
    double removed = 0.0;
    for (const auto& t : pauli_decompose(before)) {
      const bool kept = (t.label[2] == 'I' || t.label[2] == 'Z') && (t.label[3] == 'I' || t.label[3] == 'Z');
      if (!kept) removed += std::abs(t.coefficient);
    }
    CHECK(removed == doctest::Approx(0.75));
  }
}

TEST_CASE("only_transverse_on") {
  CHECK(only_transverse_on({{"XYZ", 1.0}, {"YXI", 0.5}}, {0, 1}));
  CHECK_FALSE(only_transverse_on({{"XYZ", 1.0}, {"YZI", 0.5}}, {0, 1}));
  CHECK(only_transverse_on({}, {0}));
  CHECK_FALSE(only_transverse_on({{"X", 1.0}}, {1}));
}

TEST_CASE("FID") {
  const double nu = 100.0;
  const Fid f = fid(single(nu), gates::pauli_x(), 0, 0.05, 64);
  CHECK(f.dwell == doctest::Approx(0.05 / 64));
  REQUIRE(f.samples.size() == 64);
  for (std::size_t k = 0; k < f.samples.size(); ++k) {
    const double t = k * f.dwell;
    CHECK(std::abs(f.samples[k] - std::polar(1.0, 2 * pi * nu * t)) < 1e-12);
  }
  const Fid zero = fid(single(nu), gates::pauli_z(), 0, 0.05, 64);
  for (auto v : zero.samples) CHECK(v == Complex{});

  // X (x) |0><0| with J = 50 rings at nu_1 + J/2 only
  const DensityMatrix up = (gates::identity(2) + gates::pauli_z()) / 2.0;
  const Fid two = fid(pair(30.0, -70.0, 50.0), kron(gates::pauli_x(), up), 0, 0.1, 50);
  for (std::size_t k = 0; k < two.samples.size(); ++k) {
    const double t = k * two.dwell;
    CHECK(std::abs(two.samples[k] - 0.5 * std::polar(1.0, 2 * pi * (30.0 + 25.0) * t)) < 1e-12);
  }

  CHECK_THROWS_AS(fid(single(nu), gates::pauli_x(), 1, 0.05, 64), std::out_of_range);
  CHECK_THROWS_AS(fid(single(nu), gates::pauli_x(), 0, 0.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(fid(single(nu), gates::pauli_x(), 0, 0.05, 1), std::invalid_argument);
}

TEST_CASE("FID agrees with explicit evolution and the analytic multiplet") {
  auto rng = rng_for(46);
  for (const auto& s : generic_systems()) {
    const DensityMatrix rho = random_hermitian(16, rng);
    for (std::size_t d = 0; d < 4; ++d) {
      const Fid f = fid(s, rho, d, 0.02, 16);
      const auto lines = multiplet(s, rho, d);
      REQUIRE(lines.size() == 8);
      for (std::size_t k = 0; k < f.samples.size(); k += 5) {
        const double t = k * f.dwell;
        CHECK(std::abs(f.samples[k] - signal_by_evolution(s, rho, d, t)) < 1e-9);
        Complex from_lines{};
        for (const auto& l : lines) from_lines += l.amplitude * std::polar(1.0, 2 * pi * l.frequency * t);
        CHECK(std::abs(f.samples[k] - from_lines) < 1e-9);
      }
    }
  }
}

TEST_CASE("multiplet line positions") {
  const auto s = generic_systems()[0];
  const DensityMatrix rho = pseudopure_init(PauliProductState("X00Z"));
  std::vector<Line> lit;
  for (const auto& l : multiplet(s, rho, 0))
    if (std::abs(l.amplitude) > 1e-15) lit.push_back(l);
  REQUIRE(lit.size() == 2);
  const double centre = s.larmor()[0] + s.coupling(0, 1) / 2 + s.coupling(0, 2) / 2;
  CHECK(lit[0].frequency == doctest::Approx(centre + s.coupling(0, 3) / 2));
  CHECK(lit[1].frequency == doctest::Approx(centre - s.coupling(0, 3) / 2));
  CHECK(lit[0].amplitude.real() == doctest::Approx(0.125));
  CHECK(lit[1].amplitude.real() == doctest::Approx(-0.125));
  CHECK(detectable_amplitude(s, rho, 0) == doctest::Approx(0.125));
}

TEST_CASE("spectrum of a pure exponential") {
  const std::size_t n = 256;
  const double dwell = 1e-3;
  for (double nu : {125.0, -62.5, 31.3}) {
    Fid f{dwell, {}};
    for (std::size_t k = 0; k < n; ++k) f.samples.push_back(std::polar(1.0, 2 * pi * nu * k * dwell));
    const Spectrum s = spectrum(f, 0.0);
    REQUIRE(s.frequencies.size() == n);
    REQUIRE(s.intensities.size() == n);
    CHECK(s.points == n);
    CHECK(s.frequencies.front() == doctest::Approx(-0.5 / dwell));
    for (std::size_t k = 1; k < n; ++k)
      CHECK(s.frequencies[k] - s.frequencies[k - 1] == doctest::Approx(1.0 / (n * dwell)));
    std::size_t peak = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (std::abs(s.intensities[k]) > std::abs(s.intensities[peak])) peak = k;
    CHECK(std::abs(s.frequencies[peak] - nu) <= 1.0 / (n * dwell));
  }
  // on-grid line: a single bin with the line amplitude
  Fid on_grid{dwell, {}};
  for (std::size_t k = 0; k < n; ++k) on_grid.samples.push_back(0.3 * std::polar(1.0, 2 * pi * 125.0 * k * dwell));
  const Spectrum s = spectrum(on_grid, 0.0);
  const std::size_t bin = n / 2 + 32;
  CHECK(s.frequencies[bin] == doctest::Approx(125.0));
  CHECK(std::abs(s.intensities[bin] - 0.3) < 1e-12);
  CHECK(std::abs(s.intensities[bin + 1]) < 1e-12);

  Fid zero{dwell, std::vector<Complex>(n)};
  for (auto v : spectrum(zero, 1.0).intensities) CHECK(v == Complex{});
  CHECK_THROWS_AS(spectrum(Fid{dwell, {}}, 0.0), std::invalid_argument);
}

TEST_CASE("spectrum matches a direct DFT with apodization") {
  auto rng = rng_for(47);
  std::normal_distribution<double> g;
  const std::size_t n = 37;
  Fid f{0.002, {}};
  for (std::size_t k = 0; k < n; ++k) f.samples.emplace_back(g(rng), g(rng));
  const double lb = 3.0;
  const Spectrum s = spectrum(f, lb);
  for (std::size_t m = 0; m < n; ++m) {
    Complex sum{};
    for (std::size_t k = 0; k < n; ++k) {
      const double t = k * f.dwell;
      sum += f.samples[k] * std::exp(-pi * lb * t) * std::polar(1.0, -2 * pi * s.frequencies[m] * t);
    }
    CHECK(std::abs(s.intensities[m] - sum / double(n)) < 1e-12);
  }
}

TEST_CASE("spectral overlap") {
  const std::size_t n = 128;
  auto line = [&](double nu) {
    Fid f{1e-3, {}};
    for (std::size_t k = 0; k < n; ++k) f.samples.push_back(std::polar(1.0, 2 * pi * nu * k * 1e-3));
    return spectrum(f, 0.0);
  };
  const Spectrum a = line(125.0), b = line(-250.0);
  CHECK(spectral_overlap(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_overlap(a, rephase(a, 1.1)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_overlap(a, b) < 1e-12);
  Spectrum shifted = a;
  shifted.frequencies[3] += 1.0;
  CHECK_THROWS_AS(spectral_overlap(a, shifted), std::invalid_argument);
  Spectrum shorter = a;
  shorter.frequencies.pop_back();
  shorter.intensities.pop_back();
  CHECK_THROWS_AS(spectral_overlap(a, shorter), std::invalid_argument);
  Spectrum empty = a;
  for (auto& v : empty.intensities) v = 0.0;
  CHECK(spectral_overlap(a, empty) == 0.0);
}

TEST_CASE("reference phase") {
  Spectrum s{{0.0, 1.0, 2.0}, {Complex{0, 0.1}, Complex{0, -2.0}, Complex{0.5, 0}}, 1.0, 3, 0.0};
  const double phase = reference_phase(s);
  const Spectrum r = rephase(s, phase);
  CHECK(r.intensities[1].real() == doctest::Approx(2.0));
  CHECK(std::abs(r.intensities[1].imag()) < 1e-15);
}

TEST_CASE("readout pulses and signal accounting") {
  for (const auto& s : generic_systems()) {
    if (s.coupling(2, 3) == 0.0) continue;
    const DensityMatrix init = pseudopure_init(PauliProductState(kAcausalInitialLabel));
    const DensityMatrix reference = run_sequence(s, init, initial_readout());
    CHECK(pauli_decompose(reference).size() == 4);
    const double before = detectable_amplitude(s, reference, 0);
    CHECK(before == doctest::Approx(0.125));
    for (bool rot : {false, true}) {
      const DensityMatrix fin = run_sequence(s, init, acausal_sequence(rot));
      const DensityMatrix read = run_sequence(s, fin, acausal_readout(rot));
      CHECK(detectable_amplitude(s, read, 0) == doctest::Approx(before / 4).epsilon(1e-12));
      // lines are absorptive and positive after the receiver phase
      const Complex turn = std::polar(1.0, acausal_readout_phase(rot));
      double biggest = 0.0;
      for (const auto& l : multiplet(s, read, 0)) {
        const Complex a = l.amplitude * turn;
        CHECK(std::abs(a.imag()) < 1e-15);
        biggest = std::max(biggest, a.real());
      }
      CHECK(biggest == doctest::Approx(1.0 / 32));
    }
  }
}
