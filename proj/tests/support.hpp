#pragma once

// Independent reference implementations used as oracles by the unit tests.
// They favour obviousness over speed.

#include "tfq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testing {

using tfq::Complex;
using tfq::ComplexMatrix;
using tfq::PureState;

inline std::mt19937_64 rng_for(std::uint64_t case_id, std::uint64_t trial = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(case_id), static_cast<std::uint32_t>(trial)};
  return std::mt19937_64(seq);
}

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols,
                                   std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = Complex{g(rng), g(rng)};
  }
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
  const ComplexMatrix a = random_matrix(d, d, rng);
  return (a + a.adjoint()) / 2.0;
}

inline ComplexMatrix random_density(std::size_t d, std::mt19937_64& rng) {
  const ComplexMatrix a = random_matrix(d, d, rng);
  const ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

// (a (x) b)[i*rb + k, j*cb + l] = a[i, j] b[k, l]
inline ComplexMatrix kron_by_index(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// exp(-i h t) by scaling and squaring of a long Taylor series.
inline ComplexMatrix expm_taylor(const ComplexMatrix& h, double t) {
  const ComplexMatrix a = Complex{0.0, -t} * h;
  int squarings = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.25) {
    norm /= 2.0;
    ++squarings;
  }
  const ComplexMatrix scaled = a / std::pow(2.0, squarings);
  ComplexMatrix term = ComplexMatrix::Identity(h.rows(), h.cols());
  ComplexMatrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// Digits of `index` in the mixed radix `dims`, carrier 0 most significant.
inline std::vector<std::size_t> digits(std::size_t index, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> out(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = index % dims[k];
    index /= dims[k];
  }
  return out;
}

inline std::size_t undigits(const std::vector<std::size_t>& ds, const std::vector<std::size_t>& dims) {
  std::size_t index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + ds[k];
  return index;
}

// Sum over matching traced digits of rho(row, col).
inline ComplexMatrix partial_trace_by_sum(const ComplexMatrix& rho,
                                          const std::vector<std::size_t>& dims,
                                          const std::vector<std::size_t>& keep) {
  std::vector<std::size_t> kept_dims;
  for (auto k : keep) kept_dims.push_back(dims[k]);
  std::size_t kd = 1;
  for (auto d : kept_dims) kd *= d;
  ComplexMatrix out = ComplexMatrix::Zero(kd, kd);
  for (Eigen::Index r = 0; r < rho.rows(); ++r) {
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
      const auto dr = digits(r, dims);
      const auto dc = digits(c, dims);
      bool traced_equal = true;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        const bool kept = std::find(keep.begin(), keep.end(), k) != keep.end();
        if (!kept && dr[k] != dc[k]) traced_equal = false;
      }
      if (!traced_equal) continue;
      std::vector<std::size_t> kr, kc;
      for (auto k : keep) {
        kr.push_back(dr[k]);
        kc.push_back(dc[k]);
      }
      out(undigits(kr, kept_dims), undigits(kc, kept_dims)) += rho(r, c);
    }
  }
  return out;
}

// The full-space operator acting as u on `qubit` of n.
inline ComplexMatrix embed_one(const ComplexMatrix& u, std::size_t n, std::size_t qubit) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k) {
    out = kron_by_index(out, k == qubit ? u : ComplexMatrix(ComplexMatrix::Identity(2, 2)));
  }
  return out;
}

}  // namespace testing
