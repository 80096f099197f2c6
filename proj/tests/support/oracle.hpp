// Copyright 2026 The shieldlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Independent reference implementations for tests. These use explicit index
// loops over Kronecker structure instead of the library's bit tricks, and
// random generators for property tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "shieldlab/qlinalg.hpp"

namespace oracle {

using shieldlab::Complex;
using shieldlab::Matrix;
using shieldlab::Vector;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Digits of an index over n qubits, first qubit most significant.
inline std::vector<int> digits(std::size_t index, std::size_t n) {
  std::vector<int> d(n);
  for (std::size_t q = 0; q < n; ++q) d[q] = static_cast<int>((index >> (n - 1 - q)) & 1u);
  return d;
}

inline std::size_t undigits(const std::vector<int>& d) {
  std::size_t index = 0;
  for (int b : d) index = 2 * index + static_cast<std::size_t>(b);
  return index;
}

// Trace over the qubit positions flagged in `drop`.
inline Matrix partial_trace(const Matrix& m, std::size_t n, const std::vector<bool>& drop) {
  std::size_t kept = 0;
  for (bool d : drop) kept += d ? 0 : 1;
  const std::size_t dk = std::size_t{1} << kept;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  const std::size_t d = std::size_t{1} << n;
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const auto rd = digits(r, n), cd = digits(c, n);
      bool diag = true;
      std::vector<int> rk, ck;
      for (std::size_t q = 0; q < n; ++q) {
        if (drop[q]) {
          diag = diag && rd[q] == cd[q];
        } else {
          rk.push_back(rd[q]);
          ck.push_back(cd[q]);
        }
      }
      if (diag) out(static_cast<Eigen::Index>(undigits(rk)), static_cast<Eigen::Index>(undigits(ck))) += m(r, c);
    }
  }
  return out;
}

// Transpose the qubit positions flagged in `part`.
inline Matrix partial_transpose(const Matrix& m, std::size_t n, const std::vector<bool>& part) {
  const std::size_t d = std::size_t{1} << n;
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      auto rd = digits(r, n), cd = digits(c, n);
      for (std::size_t q = 0; q < n; ++q) {
        if (part[q]) std::swap(rd[q], cd[q]);
      }
      out(static_cast<Eigen::Index>(undigits(rd)), static_cast<Eigen::Index>(undigits(cd))) = m(r, c);
    }
  }
  return out;
}

inline Eigen::VectorXd eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return es.eigenvalues();
}

inline double entropy(const Matrix& rho) {
  double s = 0.0;
  for (double l : eigenvalues(rho)) {
    if (l > 1e-12) s -= l * std::log2(l);
  }
  return s;
}

inline double binary_entropy(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

inline Matrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix z(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols(); ++j) q.col(j) *= std::polar(1.0, std::arg(r(j, j)));
  return q;
}

// Random density matrix of the given rank (Ginibre construction).
inline Matrix random_density(std::size_t dim, std::size_t rank, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rank));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(g(rng), g(rng));
  Matrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline Matrix random_operator(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline Matrix ket_to_projector(const Vector& v) { return v * v.adjoint(); }

}  // namespace oracle
