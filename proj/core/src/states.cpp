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

#include "shieldlab/states.hpp"

#include <cmath>
#include <string>

#include "shieldlab/errors.hpp"

namespace shieldlab {
namespace {

const Labels kAB = {"A", "B"};
const Labels kAprimeBprime = {"A'", "B'"};

DensityMatrix keyed_mixture(Bell majority) {
  const QOperator singlet = bell(Bell::PsiMinus, "A'", "B'").op();
  const QOperator triplet = (QOperator::identity(kAprimeBprime) - singlet) * Complex(1.0 / 3.0);
  QOperator mix = tensor(bell(Bell::PhiMinus, "A", "B").op(), singlet) * Complex(0.25) +
                  tensor(bell(majority, "A", "B").op(), triplet) * Complex(0.75);
  return DensityMatrix::from_numeric(mix.reordered(kSystemLabels));
}

Matrix sqrt_x() {
  Matrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  Matrix phase = Matrix::Identity(2, 2);
  phase(1, 1) = Complex(0, 1);
  return h * phase * h;
}

}  // namespace

Vector bell_vector(Bell kind) {
  const double s = 1.0 / std::sqrt(2.0);
  Vector v = Vector::Zero(4);
  switch (kind) {
    case Bell::PhiPlus: v(0) = s; v(3) = s; break;
    case Bell::PhiMinus: v(0) = s; v(3) = -s; break;
    case Bell::PsiPlus: v(1) = s; v(2) = s; break;
    case Bell::PsiMinus: v(1) = s; v(2) = -s; break;
  }
  return v;
}

DensityMatrix bell(Bell kind, const Label& first, const Label& second) {
  return DensityMatrix::pure({first, second}, bell_vector(kind));
}

DensityMatrix ideal_private_state() { return keyed_mixture(Bell::PhiPlus); }

DensityMatrix ideal_lab_state() { return keyed_mixture(Bell::PsiPlus); }

QOperator lab_to_private_unitary() {
  return tensor(single_qubit("A", sqrt_x()), single_qubit("B", sqrt_x()));
}

DensityMatrix source_state() {
  return DensityMatrix::from_numeric(
      tensor(bell(Bell::PhiPlus, "A", "B").op(), bell(Bell::PhiPlus, "A'", "B'").op())
          .reordered(kSystemLabels));
}

DensityMatrix prepare_by_mixing(const DensityMatrix& base, std::span<const MixingBranch> branches) {
  if (branches.empty()) throw InvalidArgument("prepare_by_mixing: no branches");
  double total = 0.0;
  for (const auto& b : branches) {
    if (!(b.probability >= 0.0)) throw InvalidArgument("prepare_by_mixing: negative probability");
    total += b.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("prepare_by_mixing: probabilities do not sum to 1");

  Matrix acc = Matrix::Zero(base.dim(), base.dim());
  for (const auto& b : branches) {
    QOperator rho = base.op();
    for (const auto& u : b.unitaries) rho = conjugate(rho, u);
    acc += b.probability * rho.matrix();
  }
  return DensityMatrix::from_numeric(QOperator(base.labels(), std::move(acc)));
}

std::vector<MixingBranch> lab_preparation_branches() {
  auto on = [](const Label& l, Matrix m) { return single_qubit(l, std::move(m)); };
  return {
      {0.25, {on("B", pauli::Z()), on("B'", pauli::Y())}},
      {0.25, {on("B", pauli::X()), on("B'", pauli::I())}},
      {0.25, {on("B", pauli::X()), on("B'", pauli::X())}},
      {0.25, {on("B", pauli::X()), on("B'", pauli::Z())}},
  };
}

void NoiseModel::validate() const {
  if (!(p_iso >= 0.0 && p_iso <= 1.0)) throw InvalidArgument("noise: p_iso outside [0, 1]");
  for (const auto& [label, r] : dephasing) {
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("noise: dephasing rate for " + label + " outside [0, 1]");
  }
  for (const auto& [label, angle] : misalignment) {
    if (!std::isfinite(angle)) throw InvalidArgument("noise: misalignment for " + label + " is not finite");
  }
}

bool NoiseModel::is_identity() const {
  if (p_iso != 0.0) return false;
  for (const auto& [l, r] : dephasing) {
    if (r != 0.0) return false;
  }
  for (const auto& [l, a] : misalignment) {
    if (a != 0.0) return false;
  }
  return true;
}

QOperator apply_noise_map(const QOperator& op, const NoiseModel& model) {
  model.validate();
  QOperator out = op;
  for (const auto& [label, angle] : model.misalignment) {
    if (angle != 0.0) out = conjugate(out, single_qubit(label, rotation_z(angle)));
  }
  for (const auto& [label, rate] : model.dephasing) {
    if (rate == 0.0) continue;
    const QOperator flipped = conjugate(out, single_qubit(label, pauli::Z()));
    out = out * Complex(1.0 - rate / 2) + flipped * Complex(rate / 2);
  }
  if (model.p_iso != 0.0) {
    const double d = static_cast<double>(out.dim());
    Matrix m = (1.0 - model.p_iso) * out.matrix();
    m.diagonal().array() += model.p_iso * out.trace() / d;
    out = QOperator(out.labels(), std::move(m));
  }
  return out;
}

DensityMatrix apply_noise(const DensityMatrix& rho, const NoiseModel& model) {
  return DensityMatrix::from_numeric(apply_noise_map(rho.op(), model));
}

double calibrate_isotropic(const DensityMatrix& target, const NoiseModel& model, double target_fidelity,
                           double tol) {
  auto f = [&](double p) {
    NoiseModel m = model;
    m.p_iso = p;
    return fidelity(target, apply_noise(target, m)) - target_fidelity;
  };
  double lo = 0.0, hi = 1.0;
  double flo = f(lo), fhi = f(hi);
  if (flo < 0.0 || fhi > 0.0) throw NumericalError("calibrate_isotropic: fidelity target not bracketed");
  // fidelity decreases monotonically in p_iso
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

NoiseModel calibrated_lab_noise() {
  NoiseModel model;
  model.misalignment["B'"] = kLabShieldMisalignment;
  model.p_iso = calibrate_isotropic(ideal_lab_state(), model, kLabFidelity);
  return model;
}

DensityMatrix calibrated_lab_state() { return apply_noise(ideal_lab_state(), calibrated_lab_noise()); }

namespace {

QOperator shield_projector(Basis basis, std::pair<int, int> outcome) {
  if (outcome.first < 0 || outcome.first > 1 || outcome.second < 0 || outcome.second > 1) {
    throw InvalidArgument("shield outcome bits must be 0 or 1");
  }
  const auto kets = basis_kets(basis);
  Vector v(4);
  const Vector& a = kets[static_cast<std::size_t>(outcome.first)];
  const Vector& b = kets[static_cast<std::size_t>(outcome.second)];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) v(2 * i + j) = a(i) * b(j);
  }
  return QOperator::projector(kShieldLabels, v);
}

}  // namespace

double shield_outcome_probability(const DensityMatrix& rho, Basis basis, std::pair<int, int> outcome) {
  const QOperator p = embed(shield_projector(basis, outcome), rho.labels());
  return (p.matrix() * rho.matrix()).trace().real();
}

ShieldOutcome condition_on_shield(const DensityMatrix& rho, Basis basis, std::pair<int, int> outcome) {
  const QOperator p = embed(shield_projector(basis, outcome), rho.labels());
  const Matrix projected = p.matrix() * rho.matrix() * p.matrix();
  const double prob = projected.trace().real();
  if (prob < 1e-12) throw NumericalError("condition_on_shield: outcome has zero probability");
  QOperator reduced = partial_trace(QOperator(rho.labels(), projected / prob), kShieldLabels);
  return {prob, DensityMatrix::from_numeric(std::move(reduced))};
}

DensityMatrix named_state(std::string_view name) {
  const std::string s(name);
  if (s == "gamma") return ideal_private_state();
  if (s == "gamma-lab") return ideal_lab_state();
  if (s == "gamma-lab-calibrated") return calibrated_lab_state();
  if (s == "source") return source_state();
  if (s == "mixed") return DensityMatrix::maximally_mixed(kSystemLabels);
  if (s == "bell:phi+") return bell(Bell::PhiPlus, "A", "B");
  if (s == "bell:phi-") return bell(Bell::PhiMinus, "A", "B");
  if (s == "bell:psi+") return bell(Bell::PsiPlus, "A", "B");
  if (s == "bell:psi-") return bell(Bell::PsiMinus, "A", "B");
  const std::string prefix = "gamma-lab-noisy(";
  if (s.starts_with(prefix) && s.ends_with(")")) {
    const std::string arg = s.substr(prefix.size(), s.size() - prefix.size() - 1);
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || arg.empty()) throw InvalidArgument("bad noise parameter in '" + s + "'");
    NoiseModel m;
    m.p_iso = p;
    return apply_noise(ideal_lab_state(), m);
  }
  throw InvalidArgument("unknown state name '" + s + "'");
}

}  // namespace shieldlab
