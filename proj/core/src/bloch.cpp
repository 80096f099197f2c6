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

#include "shieldlab/bloch.hpp"

#include <bit>
#include <cmath>

#include "shieldlab/errors.hpp"

namespace shieldlab {

PauliString PauliString::from_index(std::size_t index, std::size_t num_qubits) {
  PauliString p;
  for (std::size_t q = 0; q < num_qubits; ++q) {
    const auto digit = (index >> (2 * (num_qubits - 1 - q))) & 3u;
    const std::uint32_t bit = 1u << (num_qubits - 1 - q);
    if (digit == 1 || digit == 2) p.x_mask |= bit;
    if (digit == 2 || digit == 3) p.z_mask |= bit;
  }
  return p;
}

int PauliString::y_count() const { return std::popcount(x_mask & z_mask); }

Complex PauliString::element(std::uint32_t col) const {
  // Y = i X Z, so P = i^{#Y} X^x Z^z and P|col> = i^{#Y} (-1)^{|col & z|} |col ^ x>.
  static constexpr Complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex phase = kPowers[y_count() & 3];
  return (std::popcount(col & z_mask) & 1) ? -phase : phase;
}

Matrix PauliString::matrix(std::size_t num_qubits) const {
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  Matrix m = Matrix::Zero(d, d);
  for (std::uint32_t c = 0; c < static_cast<std::uint32_t>(d); ++c) m(c ^ x_mask, c) = element(c);
  return m;
}

BlochVector::BlochVector(std::size_t num_qubits, RealVector coefficients)
    : num_qubits_(num_qubits), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != bloch_dimension(num_qubits)) {
    throw InvalidArgument("Bloch vector length must be 4^n - 1");
  }
}

BlochVector BlochVector::zero(std::size_t num_qubits) {
  return {num_qubits, RealVector::Zero(bloch_dimension(num_qubits))};
}

BlochVector to_bloch(const QOperator& m) {
  const std::size_t n = m.num_qubits();
  const auto d = static_cast<std::uint32_t>(m.dim());
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const Matrix& a = m.matrix();
  RealVector v(bloch_dimension(n));
  for (Eigen::Index k = 1; k <= v.size(); ++k) {
    const PauliString p = PauliString::from_index(static_cast<std::size_t>(k), n);
    // Tr(M P) = sum_c M(c, c^x) <c^x|P|c>
    Complex t = 0.0;
    for (std::uint32_t c = 0; c < d; ++c) t += a(c, c ^ p.x_mask) * p.element(c);
    v(k - 1) = t.real() * scale;
  }
  return {n, std::move(v)};
}

Matrix traceless_from_coefficients(const RealVector& v, std::size_t num_qubits) {
  if (v.size() != bloch_dimension(num_qubits)) throw InvalidArgument("Bloch vector length mismatch");
  const auto d = static_cast<std::uint32_t>(1u << num_qubits);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index k = 1; k <= v.size(); ++k) {
    const double c = v(k - 1);
    if (c == 0.0) continue;
    const PauliString p = PauliString::from_index(static_cast<std::size_t>(k), num_qubits);
    for (std::uint32_t col = 0; col < d; ++col) m(col ^ p.x_mask, col) += c * scale * p.element(col);
  }
  return m;
}

QOperator from_bloch(const BlochVector& v, const Labels& labels) {
  if (labels.size() != v.num_qubits()) throw InvalidArgument("from_bloch: label count mismatch");
  Matrix m = traceless_from_coefficients(v.coefficients(), v.num_qubits());
  const double d = static_cast<double>(m.rows());
  m.diagonal().array() += 1.0 / d;
  return {labels, std::move(m)};
}

}  // namespace shieldlab
