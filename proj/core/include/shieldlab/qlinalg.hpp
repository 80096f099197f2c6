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

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace shieldlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Subsystem identifier. Every labelled subsystem is a qubit.
using Label = std::string;
using Labels = std::vector<Label>;

/// Tolerances shared by every spectral routine.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
/// Eigenvalues / singular values below this are treated as zero.
inline constexpr double kSpectralCutoff = 1e-12;

/// Dense operator on an ordered list of labelled qubits.
///
/// The first label is the most significant bit of the computational-basis
/// index, so for labels (A, A', B, B') the basis state |a a' b b'> has index
/// 8a + 4a' + 2b + b'.
class QOperator {
 public:
  QOperator() = default;
  QOperator(Labels labels, Matrix matrix);

  static QOperator identity(Labels labels);
  /// |psi><psi| for a state vector on the given labels.
  static QOperator projector(Labels labels, const Vector& psi);

  const Labels& labels() const { return labels_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t num_qubits() const { return labels_.size(); }
  Eigen::Index dim() const { return matrix_.rows(); }

  /// Position of a label in the ordered list. Throws InvalidArgument.
  std::size_t position(std::string_view label) const;
  bool has_label(std::string_view label) const;

  bool is_hermitian(double tol = kHermitianTol) const;
  Complex trace() const { return matrix_.trace(); }
  QOperator adjoint() const { return {labels_, matrix_.adjoint()}; }

  /// Same operator expressed with the labels permuted into `order`.
  QOperator reordered(const Labels& order) const;

  QOperator& operator+=(const QOperator& other);
  QOperator& operator-=(const QOperator& other);
  QOperator& operator*=(Complex s);

  friend QOperator operator+(QOperator a, const QOperator& b) { return a += b; }
  friend QOperator operator-(QOperator a, const QOperator& b) { return a -= b; }
  friend QOperator operator*(QOperator a, Complex s) { return a *= s; }
  friend QOperator operator*(Complex s, QOperator a) { return a *= s; }
  /// Matrix product; both operands must carry identical label lists.
  friend QOperator operator*(const QOperator& a, const QOperator& b);

 private:
  Labels labels_;
  Matrix matrix_;
};

/// A validated quantum state: unit trace, Hermitian, PSD within kPsdTol.
class DensityMatrix {
 public:
  /// Validates and throws NumericalError when `op` is not a state.
  explicit DensityMatrix(QOperator op);

  /// Hermitian-symmetrizes and renormalizes before validating; for results
  /// of numerical algorithms that drift by rounding.
  static DensityMatrix from_numeric(QOperator op);
  static DensityMatrix maximally_mixed(Labels labels);
  static DensityMatrix pure(Labels labels, const Vector& psi);

  const QOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  const Labels& labels() const { return op_.labels(); }
  std::size_t num_qubits() const { return op_.num_qubits(); }
  Eigen::Index dim() const { return op_.dim(); }

  double min_eigenvalue() const { return min_eigenvalue_; }
  double trace_deviation() const { return trace_deviation_; }

 private:
  QOperator op_;
  double min_eigenvalue_ = 0.0;
  double trace_deviation_ = 0.0;
};

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // columns
};

QOperator tensor(const QOperator& a, const QOperator& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

QOperator partial_trace(const QOperator& op, std::span<const Label> drop);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const Label> drop);

QOperator partial_transpose(const QOperator& op, std::span<const Label> part);

/// Lift an operator acting on a subset of labels to the full label list
/// (identity on the remaining subsystems).
QOperator embed(const QOperator& local, const Labels& full);

/// Conjugation U rho U^dagger where U may act on a subset of rho's labels.
QOperator conjugate(const QOperator& rho, const QOperator& unitary);
DensityMatrix conjugate(const DensityMatrix& rho, const QOperator& unitary);

HermitianEigen eig_hermitian(const QOperator& h);

/// -sum lambda log2 lambda, eigenvalues below kSpectralCutoff dropped.
double von_neumann_entropy(const DensityMatrix& rho);
double entropy_of_spectrum(const RealVector& eigenvalues);

double trace_norm(const QOperator& m);
double trace_distance(const QOperator& a, const QOperator& b);
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Nearest unit-trace PSD matrix in Frobenius norm (simplex projection of
/// the spectrum).
DensityMatrix project_to_physical(const QOperator& h);

/// Euclidean projection of a real vector onto the probability simplex.
RealVector project_to_simplex(const RealVector& v);

/// Hermitian matrix function f applied to the spectrum.
Matrix hermitian_sqrt(const Matrix& h);

/// Single-qubit building blocks (2x2 matrices, unlabelled).
namespace pauli {
Matrix I();
Matrix X();
Matrix Y();
Matrix Z();
}  // namespace pauli

/// A 2x2 matrix attached to one label.
QOperator single_qubit(const Label& label, const Matrix& m);

/// exp(-i angle sigma_z / 2)
Matrix rotation_z(double angle);

}  // namespace shieldlab
