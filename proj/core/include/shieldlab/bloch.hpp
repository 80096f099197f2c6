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

#include <cstddef>
#include <cstdint>

#include "shieldlab/qlinalg.hpp"

namespace shieldlab {

/// A tensor product of single-qubit Paulis, encoded by X and Z bit masks
/// over computational-basis indices (most significant bit = first label).
struct PauliString {
  std::uint32_t x_mask = 0;
  std::uint32_t z_mask = 0;

  /// Index in base 4 with digits I=0, X=1, Y=2, Z=3; first qubit is the most
  /// significant digit.
  static PauliString from_index(std::size_t index, std::size_t num_qubits);

  int y_count() const;
  /// <row| P |col> for col = row ^ x_mask; zero otherwise.
  Complex element(std::uint32_t col) const;
  Matrix matrix(std::size_t num_qubits) const;
};

/// Coefficients of a Hermitian unit-trace operator in the orthonormal basis
/// { P_k / sqrt(d) : k = 1 .. 4^n - 1 }:
///
///   rho = I/d + sum_k v_k P_k / sqrt(d),   v_k = Tr(rho P_k) / sqrt(d).
///
/// The map is an isometry for the Hilbert-Schmidt inner product. Positive
/// semidefiniteness is not implied.
class BlochVector {
 public:
  BlochVector() = default;
  BlochVector(std::size_t num_qubits, RealVector coefficients);

  static BlochVector zero(std::size_t num_qubits);

  std::size_t num_qubits() const { return num_qubits_; }
  const RealVector& coefficients() const { return coefficients_; }
  RealVector& coefficients() { return coefficients_; }
  Eigen::Index size() const { return coefficients_.size(); }

 private:
  std::size_t num_qubits_ = 0;
  RealVector coefficients_;
};

inline Eigen::Index bloch_dimension(std::size_t num_qubits) {
  return (Eigen::Index{1} << (2 * num_qubits)) - 1;
}

/// Linear coefficients Re Tr(M P_k)/sqrt(d) for any operator M; the identity
/// component is discarded.
BlochVector to_bloch(const QOperator& m);
QOperator from_bloch(const BlochVector& v, const Labels& labels);
/// Traceless part only: sum_k v_k P_k / sqrt(d).
Matrix traceless_from_coefficients(const RealVector& v, std::size_t num_qubits);

}  // namespace shieldlab
