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

#include "shieldlab/qlinalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "shieldlab/errors.hpp"

namespace shieldlab {
namespace {

std::size_t checked_qubits(Eigen::Index dim) {
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim) {
    throw InvalidArgument("operator dimension is not a power of two");
  }
  return n;
}

void require_unique(const Labels& labels) {
  std::unordered_set<std::string_view> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw InvalidArgument("duplicate label '" + l + "'");
  }
}

// Bit of a basis index that carries qubit at `position` among n qubits.
inline unsigned bit_of(std::size_t position, std::size_t n) {
  return static_cast<unsigned>(n - 1 - position);
}

std::uint32_t mask_for(const QOperator& op, std::span<const Label> subset) {
  std::uint32_t mask = 0;
  for (const auto& l : subset) mask |= 1u << bit_of(op.position(l), op.num_qubits());
  return mask;
}

// Compress the bits of `index` selected by `keep_mask` into a dense index,
// preserving their relative order.
inline std::uint32_t gather_bits(std::uint32_t index, std::uint32_t keep_mask) {
  std::uint32_t out = 0;
  unsigned k = 0;
  for (unsigned b = 0; keep_mask >> b; ++b) {
    if (keep_mask & (1u << b)) {
      out |= ((index >> b) & 1u) << k;
      ++k;
    }
  }
  return out;
}

}  // namespace

QOperator::QOperator(Labels labels, Matrix matrix)
    : labels_(std::move(labels)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw InvalidArgument("operator is not square");
  if (checked_qubits(matrix_.rows()) != labels_.size()) {
    throw InvalidArgument("matrix dimension does not match 2^(#labels)");
  }
  require_unique(labels_);
}

QOperator QOperator::identity(Labels labels) {
  const Eigen::Index d = Eigen::Index{1} << labels.size();
  return {std::move(labels), Matrix::Identity(d, d)};
}

QOperator QOperator::projector(Labels labels, const Vector& psi) {
  return {std::move(labels), psi * psi.adjoint()};
}

std::size_t QOperator::position(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  throw InvalidArgument("unknown label '" + std::string(label) + "'");
}

bool QOperator::has_label(std::string_view label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

bool QOperator::is_hermitian(double tol) const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

QOperator QOperator::reordered(const Labels& order) const {
  if (order.size() != labels_.size()) throw InvalidArgument("reorder: label count mismatch");
  const std::size_t n = labels_.size();
  std::vector<std::size_t> source(n);  // new position -> old position
  for (std::size_t i = 0; i < n; ++i) source[i] = position(order[i]);
  require_unique(order);

  const Eigen::Index d = dim();
  std::vector<std::uint32_t> map(static_cast<std::size_t>(d));  // new index -> old index
  for (std::uint32_t idx = 0; idx < static_cast<std::uint32_t>(d); ++idx) {
    std::uint32_t old = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto bit = (idx >> bit_of(i, n)) & 1u;
      old |= bit << bit_of(source[i], n);
    }
    map[idx] = old;
  }
  Matrix out(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) out(r, c) = matrix_(map[r], map[c]);
  }
  return {order, std::move(out)};
}

QOperator& QOperator::operator+=(const QOperator& other) {
  if (other.labels_ == labels_) {
    matrix_ += other.matrix_;
  } else {
    matrix_ += other.reordered(labels_).matrix_;
  }
  return *this;
}

QOperator& QOperator::operator-=(const QOperator& other) {
  if (other.labels_ == labels_) {
    matrix_ -= other.matrix_;
  } else {
    matrix_ -= other.reordered(labels_).matrix_;
  }
  return *this;
}

QOperator& QOperator::operator*=(Complex s) {
  matrix_ *= s;
  return *this;
}

QOperator operator*(const QOperator& a, const QOperator& b) {
  if (a.labels() != b.labels()) throw InvalidArgument("operator product: label mismatch");
  return {a.labels(), a.matrix() * b.matrix()};
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(QOperator op) : op_(std::move(op)) {
  if (!op_.is_hermitian(kHermitianTol)) throw NumericalError("density matrix is not Hermitian");
  trace_deviation_ = std::abs(op_.trace() - Complex(1.0, 0.0));
  if (trace_deviation_ > kTraceTol) throw NumericalError("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(op_.matrix(), Eigen::EigenvaluesOnly);
  min_eigenvalue_ = es.eigenvalues()(0);
  if (min_eigenvalue_ < -kPsdTol) throw NumericalError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::from_numeric(QOperator op) {
  Matrix m = 0.5 * (op.matrix() + op.matrix().adjoint());
  m /= m.trace().real();
  return DensityMatrix(QOperator(op.labels(), std::move(m)));
}

DensityMatrix DensityMatrix::maximally_mixed(Labels labels) {
  QOperator id = QOperator::identity(std::move(labels));
  const double d = static_cast<double>(id.dim());
  return DensityMatrix(id * Complex(1.0 / d));
}

DensityMatrix DensityMatrix::pure(Labels labels, const Vector& psi) {
  return from_numeric(QOperator::projector(std::move(labels), psi.normalized()));
}

// ---------------------------------------------------------------------------

QOperator tensor(const QOperator& a, const QOperator& b) {
  Labels labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  require_unique(labels);
  const Matrix& ma = a.matrix();
  const Matrix& mb = b.matrix();
  Matrix out(ma.rows() * mb.rows(), ma.cols() * mb.cols());
  for (Eigen::Index i = 0; i < ma.rows(); ++i) {
    for (Eigen::Index j = 0; j < ma.cols(); ++j) {
      out.block(i * mb.rows(), j * mb.cols(), mb.rows(), mb.cols()) = ma(i, j) * mb;
    }
  }
  return {std::move(labels), std::move(out)};
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::from_numeric(tensor(a.op(), b.op()));
}

QOperator partial_trace(const QOperator& op, std::span<const Label> drop) {
  if (drop.empty()) return op;
  const std::size_t n = op.num_qubits();
  const std::uint32_t drop_mask = mask_for(op, drop);
  const std::uint32_t full = static_cast<std::uint32_t>(op.dim()) - 1u;
  const std::uint32_t keep_mask = full & ~drop_mask;

  Labels kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(drop_mask & (1u << bit_of(i, n)))) kept.push_back(op.labels()[i]);
  }
  const Eigen::Index dk = Eigen::Index{1} << kept.size();
  Matrix out = Matrix::Zero(dk, dk);
  const Matrix& m = op.matrix();
  const auto d = static_cast<std::uint32_t>(op.dim());
  for (std::uint32_t r = 0; r < d; ++r) {
    const std::uint32_t rk = gather_bits(r, keep_mask);
    const std::uint32_t rd = r & drop_mask;
    for (std::uint32_t c = 0; c < d; ++c) {
      if ((c & drop_mask) != rd) continue;
      out(rk, gather_bits(c, keep_mask)) += m(r, c);
    }
  }
  return {std::move(kept), std::move(out)};
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const Label> drop) {
  return DensityMatrix::from_numeric(partial_trace(rho.op(), drop));
}

QOperator partial_transpose(const QOperator& op, std::span<const Label> part) {
  const std::uint32_t mask = mask_for(op, part);
  const auto d = static_cast<std::uint32_t>(op.dim());
  const Matrix& m = op.matrix();
  Matrix out(d, d);
  for (std::uint32_t r = 0; r < d; ++r) {
    for (std::uint32_t c = 0; c < d; ++c) {
      // swap the selected bits between row and column index
      const std::uint32_t r2 = (r & ~mask) | (c & mask);
      const std::uint32_t c2 = (c & ~mask) | (r & mask);
      out(r2, c2) = m(r, c);
    }
  }
  return {op.labels(), std::move(out)};
}

QOperator embed(const QOperator& local, const Labels& full) {
  Labels rest;
  for (const auto& l : full) {
    if (!local.has_label(l)) rest.push_back(l);
  }
  if (rest.size() + local.num_qubits() != full.size()) {
    throw InvalidArgument("embed: local labels are not a subset of the target labels");
  }
  if (rest.empty()) return local.reordered(full);
  return tensor(local, QOperator::identity(rest)).reordered(full);
}

QOperator conjugate(const QOperator& rho, const QOperator& unitary) {
  const QOperator u = embed(unitary, rho.labels());
  return {rho.labels(), u.matrix() * rho.matrix() * u.matrix().adjoint()};
}

DensityMatrix conjugate(const DensityMatrix& rho, const QOperator& unitary) {
  return DensityMatrix::from_numeric(conjugate(rho.op(), unitary));
}

HermitianEigen eig_hermitian(const QOperator& h) {
  if (!h.is_hermitian(1e-9)) throw InvalidArgument("eig_hermitian: operator is not Hermitian");
  const Matrix sym = 0.5 * (h.matrix() + h.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double entropy_of_spectrum(const RealVector& eigenvalues) {
  double s = 0.0;
  for (double l : eigenvalues) {
    if (l > kSpectralCutoff) s -= l * std::log2(l);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
  return std::max(0.0, entropy_of_spectrum(es.eigenvalues()));
}

double trace_norm(const QOperator& m) {
  if (m.is_hermitian(1e-9)) {
    const Matrix sym = 0.5 * (m.matrix() + m.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (double l : es.eigenvalues()) {
      if (std::abs(l) > kSpectralCutoff) s += std::abs(l);
    }
    return s;
  }
  Eigen::JacobiSVD<Matrix> svd(m.matrix());
  double s = 0.0;
  for (double v : svd.singularValues()) {
    if (v > kSpectralCutoff) s += v;
  }
  return s;
}

double trace_distance(const QOperator& a, const QOperator& b) { return 0.5 * trace_norm(a - b); }

Matrix hermitian_sqrt(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  const RealVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.labels() != sigma.labels()) {
    if (rho.num_qubits() != sigma.num_qubits()) throw InvalidArgument("fidelity: dimension mismatch");
    return fidelity(rho, DensityMatrix(sigma.op().reordered(rho.labels())));
  }
  // singular values of sqrt(rho) sqrt(sigma): near-null directions contribute
  // O(eps) here instead of O(sqrt(eps)) through sqrt(sqrt(rho) sigma sqrt(rho))
  const Matrix product = hermitian_sqrt(rho.matrix()) * hermitian_sqrt(sigma.matrix());
  Eigen::JacobiSVD<Matrix> svd(product);
  const double f = svd.singularValues().sum();
  return std::clamp(f, 0.0, 1.0);
}

RealVector project_to_simplex(const RealVector& v) {
  // Sort-based Euclidean projection (Held, Wolfe, Crowder).
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

DensityMatrix project_to_physical(const QOperator& h) {
  const HermitianEigen e = eig_hermitian(h);
  const RealVector clipped = project_to_simplex(e.values);
  Matrix m = e.vectors * clipped.asDiagonal() * e.vectors.adjoint();
  return DensityMatrix::from_numeric(QOperator(h.labels(), std::move(m)));
}

namespace pauli {
Matrix I() { return Matrix::Identity(2, 2); }
Matrix X() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix Y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
Matrix Z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

QOperator single_qubit(const Label& label, const Matrix& m) { return {Labels{label}, m}; }

Matrix rotation_z(double angle) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::polar(1.0, -angle / 2);
  m(1, 1) = std::polar(1.0, angle / 2);
  return m;
}

}  // namespace shieldlab
