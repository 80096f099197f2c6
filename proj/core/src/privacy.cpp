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

#include "shieldlab/privacy.hpp"

#include <algorithm>
#include <cmath>

#include "shieldlab/errors.hpp"
#include "shieldlab/states.hpp"

namespace shieldlab {
namespace {

constexpr double kDegenerate = 1e-12;

struct Conditional {
  double probability;
  QOperator rest;  // unnormalized <a|rho|a> on every label except A
};

std::vector<Conditional> condition_on_alice(const DensityMatrix& rho, Basis key_basis) {
  const auto projectors = key_measurement_basis(key_basis);
  const Labels& labels = rho.labels();
  const Label alice = "A";
  std::vector<Conditional> out;
  for (const auto& p : projectors) {
    const QOperator proj = embed(single_qubit(alice, p), labels);
    const Matrix projected = proj.matrix() * rho.matrix() * proj.matrix();
    const double prob = projected.trace().real();
    const Label drop[] = {alice};
    out.push_back({prob, partial_trace(QOperator(labels, projected), drop)});
  }
  return out;
}

}  // namespace

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

double log_negativity(const DensityMatrix& rho, const Labels& bob_side) {
  if (bob_side.empty() || bob_side.size() >= rho.num_qubits()) {
    throw InvalidArgument("log_negativity: partition must split the system");
  }
  for (const auto& l : bob_side) {
    if (!rho.op().has_label(l)) throw InvalidArgument("log_negativity: unknown label '" + l + "'");
  }
  return std::max(0.0, std::log2(trace_norm(partial_transpose(rho.op(), bob_side))));
}

double log_negativity(const DensityMatrix& rho) {
  Labels bob;
  for (const auto& l : rho.labels()) {
    if (l == "B" || l == "B'") bob.push_back(l);
  }
  return log_negativity(rho, bob);
}

std::array<Matrix, 2> key_measurement_basis(Basis basis) {
  const auto kets = basis_kets(basis);
  return {kets[0] * kets[0].adjoint(), kets[1] * kets[1].adjoint()};
}

HolevoResult holevo_chi_B(const DensityMatrix& rho, Basis key_basis) {
  if (!rho.op().has_label("A") || !rho.op().has_label("B")) {
    throw InvalidArgument("holevo_chi_B: state needs labels A and B");
  }
  HolevoResult result;
  Matrix average = Matrix::Zero(2, 2);
  double conditional_entropy = 0.0;
  for (const auto& c : condition_on_alice(rho, key_basis)) {
    result.probabilities.push_back(c.probability);
    if (c.probability < kDegenerate) continue;
    Labels drop;
    for (const auto& l : c.rest.labels()) {
      if (l != "B") drop.push_back(l);
    }
    const QOperator bob = partial_trace(c.rest, drop);
    average += bob.matrix();
    const DensityMatrix cond = DensityMatrix::from_numeric(bob * Complex(1.0 / c.probability));
    conditional_entropy += c.probability * von_neumann_entropy(cond);
    result.conditionals.push_back(cond);
  }
  const DensityMatrix avg = DensityMatrix::from_numeric(QOperator({"B"}, average));
  result.chi = std::max(0.0, von_neumann_entropy(avg) - conditional_entropy);
  return result;
}

HolevoResult holevo_chi_E(const DensityMatrix& rho, Basis key_basis) {
  if (!rho.op().has_label("A")) throw InvalidArgument("holevo_chi_E: state needs label A");
  HolevoResult result;
  double conditional_entropy = 0.0;
  for (const auto& c : condition_on_alice(rho, key_basis)) {
    result.probabilities.push_back(c.probability);
    if (c.probability < kDegenerate) continue;
    const DensityMatrix cond = DensityMatrix::from_numeric(c.rest * Complex(1.0 / c.probability));
    conditional_entropy += c.probability * von_neumann_entropy(cond);
    result.conditionals.push_back(cond);
  }
  result.chi = std::max(0.0, von_neumann_entropy(rho) - conditional_entropy);
  return result;
}

KeyRateReport key_rate_cqq(const DensityMatrix& rho, Basis key_basis) {
  const HolevoResult b = holevo_chi_B(rho, key_basis);
  const HolevoResult e = holevo_chi_E(rho, key_basis);
  KeyRateReport r;
  r.chi_B = b.chi;
  r.chi_E = e.chi;
  r.x_cqq = r.chi_B - r.chi_E;
  r.log_negativity = log_negativity(rho);
  r.key_basis = key_basis;
  r.probabilities = b.probabilities;
  r.separation = r.x_cqq - r.log_negativity;
  return r;
}

DistillationTable distillation_analysis(const DensityMatrix& rho, Basis shield_basis, Basis key_basis) {
  const Labels& labels = rho.labels();
  if (labels.size() != 4) throw InvalidArgument("distillation_analysis: expected a state on (A, A', B, B')");

  auto branch = [&](std::pair<int, int> o1, std::pair<int, int> o2) {
    Matrix acc = Matrix::Zero(4, 4);
    double total = 0.0;
    for (auto o : {o1, o2}) {
      const double p = shield_outcome_probability(rho, shield_basis, o);
      if (p < kDegenerate) continue;
      const ShieldOutcome s = condition_on_shield(rho, shield_basis, o);
      acc += s.probability * s.state.matrix();
      total += s.probability;
    }
    if (total < kDegenerate) throw NumericalError("distillation_analysis: branch has zero probability");
    DistillationBranch b{total, DensityMatrix::from_numeric(QOperator(kKeyLabels, acc / total)), 0.0};
    b.x_cqq = key_rate_cqq(b.state, key_basis).x_cqq;
    return b;
  };

  DistillationTable t{branch({0, 0}, {1, 1}), branch({0, 1}, {1, 0}), 0.0, shield_basis, key_basis};
  t.average_rate = t.identical.probability * std::max(0.0, t.identical.x_cqq) +
                   t.opposite.probability * std::max(0.0, t.opposite.x_cqq);
  return t;
}

}  // namespace shieldlab
