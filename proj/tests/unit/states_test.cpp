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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "shieldlab/basis.hpp"
#include "shieldlab/errors.hpp"
#include "shieldlab/states.hpp"

namespace shieldlab {
namespace {

constexpr int kCases = 100;

TEST(Bell, ReductionsOrthogonalityAndPauliMap) {
  const Label drop_b[] = {"B"};
  const Label drop_a[] = {"A"};
  for (Bell k : {Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus}) {
    const DensityMatrix b = bell(k, "A", "B");
    EXPECT_LT(oracle::max_abs(partial_trace(b.op(), drop_b).matrix() - Matrix::Identity(2, 2) / 2.0), 1e-15);
    EXPECT_LT(oracle::max_abs(partial_trace(b.op(), drop_a).matrix() - Matrix::Identity(2, 2) / 2.0), 1e-15);
  }
  EXPECT_NEAR(std::abs(bell_vector(Bell::PhiMinus).dot(bell_vector(Bell::PhiPlus))), 0.0, 1e-15);
  const Vector mapped = oracle::kron(pauli::I(), pauli::X()) * bell_vector(Bell::PhiPlus);
  EXPECT_LT((mapped - bell_vector(Bell::PsiPlus)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(IdealStates, PrivateStateStructure) {
  const DensityMatrix g = ideal_private_state();
  EXPECT_NEAR(g.matrix().trace().real(), 1.0, 1e-14);
  const auto ev = oracle::eigenvalues(g.matrix());
  int rank = 0;
  for (double l : ev) rank += l > 1e-12 ? 1 : 0;
  EXPECT_EQ(rank, 4);

  // explicit assembly from the definition, branches in either order
  const Vector psi_minus = bell_vector(Bell::PsiMinus);
  const Matrix rho_minus = psi_minus * psi_minus.adjoint();
  const Matrix rho_plus = (Matrix::Identity(4, 4) - rho_minus) / 3.0;
  const Matrix phi_m = oracle::ket_to_projector(bell_vector(Bell::PhiMinus));
  const Matrix phi_p = oracle::ket_to_projector(bell_vector(Bell::PhiPlus));
  const Matrix forward = 0.25 * oracle::kron(phi_m, rho_minus) + 0.75 * oracle::kron(phi_p, rho_plus);
  const Matrix backward = 0.75 * oracle::kron(phi_p, rho_plus) + 0.25 * oracle::kron(phi_m, rho_minus);
  const QOperator expected = QOperator({"A", "B", "A'", "B'"}, forward).reordered(kSystemLabels);
  EXPECT_LT(oracle::max_abs(g.matrix() - expected.matrix()), 1e-14);
  EXPECT_LT(oracle::max_abs(forward - backward), 1e-15);
}

TEST(IdealStates, LabStateSpectrumAndReduction) {
  const DensityMatrix g = ideal_lab_state();
  const auto ev = oracle::eigenvalues(g.matrix());
  for (Eigen::Index i = 0; i < 12; ++i) EXPECT_NEAR(ev(i), 0.0, 1e-12);
  for (Eigen::Index i = 12; i < 16; ++i) EXPECT_NEAR(ev(i), 0.25, 1e-12);
  const Label shield[] = {"A'", "B'"};
  const Matrix expected = 0.25 * oracle::ket_to_projector(bell_vector(Bell::PhiMinus)) +
                          0.75 * oracle::ket_to_projector(bell_vector(Bell::PsiPlus));
  EXPECT_LT(oracle::max_abs(partial_trace(g.op(), shield).matrix() - expected), 1e-12);
}

// All 24 single-qubit Cliffords up to phase, generated from H and S.
std::vector<Matrix> cliffords() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix h(2, 2), ph = Matrix::Identity(2, 2);
  h << s, s, s, -s;
  ph(1, 1) = Complex(0, 1);
  std::vector<Matrix> group{Matrix::Identity(2, 2)};
  auto same_up_to_phase = [](const Matrix& a, const Matrix& b) {
    return std::abs(std::abs((a.adjoint() * b).trace()) - 2.0) < 1e-9;
  };
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (const Matrix& g : {h, ph}) {
      const Matrix next = g * group[i];
      bool seen = false;
      for (const auto& m : group) seen = seen || same_up_to_phase(m, next);
      if (!seen) group.push_back(next);
    }
  }
  return group;
}

TEST(IdealStates, LocalUnitaryOracleSearch) {
  const auto group = cliffords();
  ASSERT_EQ(group.size(), 24u);
  const DensityMatrix target = ideal_private_state(), lab = ideal_lab_state();
  int hits = 0, hits_b_only = 0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (std::size_t j = 0; j < group.size(); ++j) {
      const QOperator u = tensor(single_qubit("A", group[i]), single_qubit("B", group[j]));
      if (fidelity(target, conjugate(lab, u)) > 1 - 1e-9) {
        ++hits;
        if (i == 0) ++hits_b_only;
      }
    }
  }
  EXPECT_GT(hits, 0);
  EXPECT_EQ(hits_b_only, 0);
  EXPECT_NEAR(fidelity(target, conjugate(lab, lab_to_private_unitary())), 1.0, 1e-9);
}

TEST(Mixing, LabPreparationFromSourceIsExact) {
  const auto branches = lab_preparation_branches();
  const DensityMatrix prepared = prepare_by_mixing(source_state(), branches);
  EXPECT_LT(oracle::max_abs(prepared.matrix() - ideal_lab_state().matrix()), 1e-14);
}

TEST(Mixing, SimpleCasesAndErrors) {
  const DensityMatrix base = ideal_lab_state();
  const std::vector<MixingBranch> identity{{1.0, {}}};
  EXPECT_LT(oracle::max_abs(prepare_by_mixing(base, identity).matrix() - base.matrix()), 1e-15);

  Vector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const DensityMatrix p = DensityMatrix::pure({"q"}, plus);
  const std::vector<MixingBranch> dephase{{0.5, {}}, {0.5, {single_qubit("q", pauli::Z())}}};
  EXPECT_LT(oracle::max_abs(prepare_by_mixing(p, dephase).matrix() - Matrix::Identity(2, 2) / 2.0), 1e-15);

  const std::vector<MixingBranch> bad{{0.5, {}}, {0.6, {}}};
  EXPECT_THROW(prepare_by_mixing(p, bad), InvalidArgument);
  const std::vector<MixingBranch> negative{{-0.5, {}}, {1.5, {}}};
  EXPECT_THROW(prepare_by_mixing(p, negative), InvalidArgument);
}

TEST(Noise, IdentityModelsAndValidation) {
  const DensityMatrix g = ideal_lab_state();
  EXPECT_LT(oracle::max_abs(apply_noise(g, NoiseModel{}).matrix() - g.matrix()), 1e-15);
  NoiseModel full;
  full.p_iso = 1.0;
  EXPECT_LT(oracle::max_abs(apply_noise(g, full).matrix() - Matrix::Identity(16, 16) / 16.0), 1e-15);
  NoiseModel bad;
  bad.p_iso = 1.5;
  EXPECT_THROW(apply_noise(g, bad), InvalidArgument);
  bad = {};
  bad.dephasing["A"] = -0.1;
  EXPECT_THROW(apply_noise(g, bad), InvalidArgument);
}

TEST(Noise, FidelityDecreasesWithIsotropicWeight) {
  const DensityMatrix g = ideal_lab_state();
  double previous = 1.0 + 1e-12;
  for (int i = 0; i <= 20; ++i) {
    NoiseModel m;
    m.p_iso = i / 20.0;
    const double f = fidelity(g, apply_noise(g, m));
    EXPECT_LT(f, previous);
    previous = f;
  }
}

TEST(Noise, CalibrationHitsTargetFidelity) {
  const DensityMatrix g = ideal_lab_state();
  const NoiseModel m = calibrated_lab_noise();
  EXPECT_NEAR(fidelity(g, apply_noise(g, m)), kLabFidelity, 5e-4);
  EXPECT_NEAR(fidelity(g, calibrated_lab_state()), kLabFidelity, 5e-4);
  EXPECT_GT(m.p_iso, 0.0);
  EXPECT_LT(m.p_iso, 0.1);

  NoiseModel iso_only;
  const double p = calibrate_isotropic(g, iso_only, kLabFidelity);
  iso_only.p_iso = p;
  EXPECT_NEAR(fidelity(g, apply_noise(g, iso_only)), kLabFidelity, 1e-9);
  EXPECT_THROW(calibrate_isotropic(g, iso_only, 0.0), NumericalError);
}

// Choi matrix of the channel on two qubits must be PSD with the input
// marginal equal to the identity.
TEST(Noise, PropertyChannelIsCompletelyPositiveTracePreserving) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Labels sys = {"A", "B'"};
  for (int c = 0; c < kCases; ++c) {
    NoiseModel m;
    m.p_iso = unit(rng);
    m.dephasing["A"] = unit(rng);
    m.misalignment["B'"] = 6.0 * unit(rng) - 3.0;
    Matrix choi = Matrix::Zero(16, 16);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        Matrix e = Matrix::Zero(4, 4);
        e(i, j) = 1.0;
        const Matrix out = apply_noise_map(QOperator(sys, e), m).matrix();
        choi += oracle::kron(e, out);
      }
    }
    ASSERT_GE(oracle::eigenvalues(choi).minCoeff(), -1e-12);
    const std::vector<bool> drop_output{false, false, true, true};
    ASSERT_LT(oracle::max_abs(oracle::partial_trace(choi, 4, drop_output) - Matrix::Identity(4, 4)), 1e-12);
  }
}

TEST(Noise, PropertyPreservesTraceAndHermiticity) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < kCases; ++c) {
    const DensityMatrix rho(QOperator(kSystemLabels, oracle::random_density(16, 1 + rng() % 16, rng)));
    NoiseModel m;
    m.p_iso = unit(rng);
    m.dephasing[kSystemLabels[rng() % 4]] = unit(rng);
    m.misalignment[kSystemLabels[rng() % 4]] = unit(rng);
    const QOperator out = apply_noise_map(rho.op(), m);
    ASSERT_NEAR(out.trace().real(), 1.0, 1e-12);
    ASSERT_TRUE(out.is_hermitian());
  }
}

TEST(Shield, LabStateBranches) {
  const DensityMatrix g = ideal_lab_state();
  const Matrix psi_plus = oracle::ket_to_projector(bell_vector(Bell::PsiPlus));
  const Matrix phi_minus = oracle::ket_to_projector(bell_vector(Bell::PhiMinus));
  double identical = 0.0;
  for (int v = 0; v < 2; ++v) {
    const ShieldOutcome same = condition_on_shield(g, Basis::Z, {v, v});
    identical += same.probability;
    EXPECT_NEAR(fidelity(same.state, DensityMatrix(QOperator(kKeyLabels, psi_plus))), 1.0, 1e-9);
    const ShieldOutcome diff = condition_on_shield(g, Basis::Z, {v, 1 - v});
    EXPECT_LT(oracle::max_abs(diff.state.matrix() - 0.5 * (phi_minus + psi_plus)), 1e-12);
  }
  EXPECT_NEAR(identical, 0.5, 1e-12);
  EXPECT_THROW(condition_on_shield(g, Basis::Z, {2, 0}), InvalidArgument);
}

TEST(Shield, ProductStateIsUnaffected) {
  std::mt19937_64 rng(33);
  const Matrix ab = oracle::random_density(4, 2, rng), shield = oracle::random_density(4, 3, rng);
  const DensityMatrix rho = DensityMatrix::from_numeric(
      tensor(QOperator(kKeyLabels, ab), QOperator(kShieldLabels, shield)).reordered(kSystemLabels));
  for (Basis b : kAllBases) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        EXPECT_LT(oracle::max_abs(condition_on_shield(rho, b, {x, y}).state.matrix() - ab), 1e-12);
      }
    }
  }
}

TEST(Shield, PropertyOutcomesResolveTheReducedState) {
  std::mt19937_64 rng(34);
  const Label shield_labels[] = {"A'", "B'"};
  for (int c = 0; c < kCases; ++c) {
    const DensityMatrix rho(QOperator(kSystemLabels, oracle::random_density(16, 1 + rng() % 16, rng)));
    const Basis b = kAllBases[rng() % 3];
    double total = 0.0;
    Matrix acc = Matrix::Zero(4, 4);
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const ShieldOutcome s = condition_on_shield(rho, b, {x, y});
        ASSERT_NEAR(s.probability, shield_outcome_probability(rho, b, {x, y}), 1e-14);
        total += s.probability;
        acc += s.probability * s.state.matrix();
      }
    }
    ASSERT_NEAR(total, 1.0, 1e-12);
    ASSERT_LT(oracle::max_abs(acc - partial_trace(rho.op(), shield_labels).matrix()), 1e-12);
  }
}

TEST(Registry, NamedStates) {
  EXPECT_LT(oracle::max_abs(named_state("gamma").matrix() - ideal_private_state().matrix()), 1e-15);
  EXPECT_LT(oracle::max_abs(named_state("gamma-lab").matrix() - ideal_lab_state().matrix()), 1e-15);
  NoiseModel m;
  m.p_iso = 0.1;
  EXPECT_LT(oracle::max_abs(named_state("gamma-lab-noisy(0.1)").matrix() - apply_noise(ideal_lab_state(), m).matrix()),
            1e-15);
  EXPECT_EQ(named_state("bell:psi-").num_qubits(), 2u);
  EXPECT_THROW(named_state("gamma-lab-noisy(x)"), InvalidArgument);
  EXPECT_THROW(named_state("werner"), InvalidArgument);
}

}  // namespace
}  // namespace shieldlab
