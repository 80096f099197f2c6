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
#include "shieldlab/errors.hpp"
#include "shieldlab/privacy.hpp"
#include "shieldlab/states.hpp"

namespace shieldlab {
namespace {

constexpr int kCases = 100;
constexpr double kLogNegIdeal = 0.5849625007211561;     // log2(3) - 1
constexpr double kReducedRate = 0.18872187554086717;    // 1 - H2(1/4)
constexpr double kReducedChiE = 0.8112781244591328;     // H2(1/4)

// +1 and -1 eigenvectors of sigma_y, written out by hand
std::array<Vector, 2> y_kets() {
  const double s = 1.0 / std::sqrt(2.0);
  Vector up(2), down(2);
  up << s, Complex(0, s);
  down << s, Complex(0, -s);
  return {up, down};
}

// Brute-force Holevo quantities; A is qubit 0 and B is qubit `b` of n.
struct OracleHolevo {
  double chi_b = 0.0;
  double chi_e = 0.0;
};

OracleHolevo oracle_holevo(const Matrix& rho, std::size_t n, std::size_t b, const std::array<Vector, 2>& kets) {
  const Eigen::Index rest = Eigen::Index{1} << (n - 1);
  OracleHolevo out;
  Matrix avg_b = Matrix::Zero(2, 2);
  double cond_b = 0.0, cond_rest = 0.0;
  for (const auto& k : kets) {
    const Matrix proj = oracle::kron(oracle::ket_to_projector(k), Matrix::Identity(rest, rest));
    const Matrix m = proj * rho * proj;
    const double p = m.trace().real();
    if (p < 1e-12) continue;
    std::vector<bool> drop_all_but_b(n, true), drop_a(n, false);
    drop_all_but_b[b] = false;
    drop_a[0] = true;
    const Matrix on_b = oracle::partial_trace(m, n, drop_all_but_b) / p;
    const Matrix on_rest = oracle::partial_trace(m, n, drop_a) / p;
    avg_b += p * on_b;
    cond_b += p * oracle::entropy(on_b);
    cond_rest += p * oracle::entropy(on_rest);
  }
  out.chi_b = oracle::entropy(avg_b) - cond_b;
  out.chi_e = oracle::entropy(rho) - cond_rest;
  return out;
}

DensityMatrix reduced_lab_state() {
  return partial_trace(ideal_lab_state(), std::span<const Label>(kShieldLabels));
}

DensityMatrix random_state(std::mt19937_64& rng, std::size_t rank) {
  return DensityMatrix(QOperator(kSystemLabels, oracle::random_density(16, rank, rng)));
}

QOperator random_unitary_on(const Labels& labels, std::mt19937_64& rng) {
  return QOperator(labels, oracle::random_unitary(std::size_t{1} << labels.size(), rng));
}

TEST(LogNegativity, IdealStates) {
  EXPECT_NEAR(log_negativity(ideal_private_state()), kLogNegIdeal, 1e-9);
  EXPECT_NEAR(log_negativity(ideal_lab_state()), kLogNegIdeal, 1e-9);
}

TEST(LogNegativity, ProductAndBellTimesNoise) {
  std::mt19937_64 rng(31);
  const DensityMatrix aap(QOperator({"A", "A'"}, oracle::random_density(4, 4, rng)));
  const DensityMatrix bbp(QOperator({"B", "B'"}, oracle::random_density(4, 4, rng)));
  const DensityMatrix product(tensor(aap, bbp).op().reordered(kSystemLabels));
  EXPECT_NEAR(log_negativity(product), 0.0, 1e-10);

  // |phi+>_AB (x) I/4: PT spectrum {1/2, 1/2, 1/2, -1/2} / 4 blocks, trace norm 2
  const DensityMatrix bell_noise(
      tensor(bell(Bell::PhiPlus, "A", "B"), DensityMatrix::maximally_mixed({"A'", "B'"})).op().reordered(kSystemLabels));
  EXPECT_NEAR(log_negativity(bell_noise), 1.0, 1e-10);
  EXPECT_THROW(log_negativity(bell_noise, {"C"}), InvalidArgument);
}

TEST(LogNegativity, PropertyLocalUnitaryInvariance) {
  std::mt19937_64 rng(32);
  for (int c = 0; c < kCases; ++c) {
    const DensityMatrix rho = random_state(rng, 1 + rng() % 16);
    const QOperator u = random_unitary_on({"A", "A'"}, rng);
    const QOperator v = random_unitary_on({"B", "B'"}, rng);
    const DensityMatrix moved = conjugate(conjugate(rho, u), v);
    const double l = log_negativity(rho);
    ASSERT_NEAR(log_negativity(moved), l, 1e-9);
    ASSERT_GE(l, -1e-12);
  }
}

TEST(KeyBasis, Projectors) {
  for (Basis b : kAllBases) {
    const auto p = key_measurement_basis(b);
    EXPECT_LT(oracle::max_abs(p[0] + p[1] - Matrix::Identity(2, 2)), 1e-15);
    EXPECT_LT(oracle::max_abs(p[0] * p[1]), 1e-15);
    EXPECT_LT(oracle::max_abs(p[0] * p[0] - p[0]), 1e-15);
  }
  const auto z = key_measurement_basis(Basis::Z);
  EXPECT_NEAR(z[0](0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(z[1](1, 1).real(), 1.0, 1e-15);
  const auto y = key_measurement_basis(Basis::Y);
  const auto k = y_kets();
  EXPECT_LT(oracle::max_abs(y[0] - oracle::ket_to_projector(k[0])), 1e-15);
}

TEST(Holevo, LabStateIsOneSecureBit) {
  const HolevoResult b = holevo_chi_B(ideal_lab_state(), Basis::Y);
  const HolevoResult e = holevo_chi_E(ideal_lab_state(), Basis::Y);
  EXPECT_NEAR(b.chi, 1.0, 1e-9);
  EXPECT_NEAR(e.chi, 0.0, 1e-9);
  ASSERT_EQ(b.probabilities.size(), 2u);
  EXPECT_NEAR(b.probabilities[0], 0.5, 1e-12);
  for (const auto& c : b.conditionals) EXPECT_NEAR(von_neumann_entropy(c), 0.0, 1e-9);
}

TEST(Holevo, ProductAndBellStates) {
  std::mt19937_64 rng(33);
  const DensityMatrix rest(QOperator({"A'", "B", "B'"}, oracle::random_density(8, 3, rng)));
  const DensityMatrix product(
      tensor(DensityMatrix::maximally_mixed({"A"}), rest).op().reordered(kSystemLabels));
  EXPECT_NEAR(holevo_chi_B(product, Basis::Y).chi, 0.0, 1e-10);

  const DensityMatrix phi = bell(Bell::PhiPlus, "A", "B");
  EXPECT_NEAR(holevo_chi_B(phi, Basis::Z).chi, 1.0, 1e-10);
  // pure state with a pure shield: nothing left for an environment
  const DensityMatrix pure(tensor(phi, DensityMatrix::pure({"A'", "B'"}, bell_vector(Bell::PsiMinus)))
                               .op()
                               .reordered(kSystemLabels));
  EXPECT_NEAR(holevo_chi_E(pure, Basis::Z).chi, 0.0, 1e-10);
}

TEST(Holevo, ReducedLabState) {
  const DensityMatrix ab = reduced_lab_state();
  EXPECT_NEAR(holevo_chi_E(ab, Basis::Y).chi, kReducedChiE, 1e-9);
  const KeyRateReport r = key_rate_cqq(ab, Basis::Y);
  EXPECT_NEAR(r.x_cqq, kReducedRate, 1e-9);
  EXPECT_NEAR(kReducedChiE, oracle::binary_entropy(0.25), 1e-15);
}

TEST(Holevo, PropertyMatchesBruteForceAndIsNonnegative) {
  std::mt19937_64 rng(34);
  for (int c = 0; c < kCases; ++c) {
    const DensityMatrix rho = random_state(rng, 1 + rng() % 16);
    const HolevoResult b = holevo_chi_B(rho, Basis::Y);
    const HolevoResult e = holevo_chi_E(rho, Basis::Y);
    const OracleHolevo o = oracle_holevo(rho.matrix(), 4, 2, y_kets());
    ASSERT_NEAR(b.chi, o.chi_b, 1e-9);
    ASSERT_NEAR(e.chi, o.chi_e, 1e-9);
    ASSERT_GE(b.chi, -1e-10);
    ASSERT_LE(b.chi, 1.0 + 1e-10);
    ASSERT_GE(e.chi, -1e-10);
  }
}

TEST(KeyRate, IdealSeparation) {
  const KeyRateReport r = key_rate_cqq(ideal_lab_state(), Basis::Y);
  EXPECT_NEAR(r.x_cqq, 1.0, 1e-9);
  EXPECT_NEAR(r.log_negativity, kLogNegIdeal, 1e-9);
  EXPECT_NEAR(r.separation, 1.0 - kLogNegIdeal, 1e-9);
  EXPECT_EQ(r.x_cqq, r.chi_B - r.chi_E);
  EXPECT_EQ(r.key_basis, Basis::Y);
}

TEST(KeyRate, CalibratedStateNearLabValues) {
  const KeyRateReport r = key_rate_cqq(calibrated_lab_state(), Basis::Y);
  EXPECT_NEAR(r.x_cqq, 0.690, 0.05);
  EXPECT_NEAR(r.log_negativity, 0.581, 0.05);
  const KeyRateReport reduced =
      key_rate_cqq(partial_trace(calibrated_lab_state(), std::span<const Label>(kShieldLabels)), Basis::Y);
  EXPECT_LE(reduced.x_cqq, 0.05);
}

TEST(KeyRate, ClassicalMixtureHasNoKey) {
  const auto k = y_kets();
  const Vector zero_zero = oracle::kron(k[0], k[0]), one_one = oracle::kron(k[1], k[1]);
  const Matrix ab = 0.5 * (zero_zero * zero_zero.adjoint() + one_one * one_one.adjoint());
  const DensityMatrix rho(
      tensor(DensityMatrix(QOperator({"A", "B"}, ab)), DensityMatrix::maximally_mixed(kShieldLabels))
          .op()
          .reordered(kSystemLabels));
  EXPECT_NEAR(key_rate_cqq(rho, Basis::Y).x_cqq, 0.0, 1e-9);
  EXPECT_NEAR(key_rate_cqq(DensityMatrix(QOperator({"A", "B"}, ab)), Basis::Y).x_cqq, 0.0, 1e-9);
}

TEST(KeyRate, PropertyShieldUnitaryInvariance) {
  std::mt19937_64 rng(35);
  for (int c = 0; c < kCases; ++c) {
    const DensityMatrix rho = c % 2 ? random_state(rng, 1 + rng() % 16)
                                    : apply_noise(ideal_lab_state(), NoiseModel{0.3 * (rng() % 100) / 100.0, {}, {}});
    const DensityMatrix moved = conjugate(rho, random_unitary_on({"A'", "B'"}, rng));
    const KeyRateReport a = key_rate_cqq(rho), b = key_rate_cqq(moved);
    ASSERT_NEAR(a.x_cqq, b.x_cqq, 1e-9);
    ASSERT_EQ(a.x_cqq, a.chi_B - a.chi_E);
  }
}

TEST(Distillation, LabStateZShield) {
  const DistillationTable t = distillation_analysis(ideal_lab_state(), Basis::Z, Basis::Y);
  EXPECT_NEAR(t.identical.probability, 0.5, 1e-12);
  EXPECT_NEAR(t.opposite.probability, 0.5, 1e-12);
  const DensityMatrix psi_plus = bell(Bell::PsiPlus, "A", "B");
  EXPECT_NEAR(fidelity(t.identical.state, psi_plus), 1.0, 1e-9);
  EXPECT_NEAR(t.identical.x_cqq, 1.0, 1e-9);
  EXPECT_NEAR(t.opposite.x_cqq, 0.0, 1e-9);
  EXPECT_NEAR(t.average_rate, 0.5, 1e-9);
  EXPECT_LT(t.average_rate, key_rate_cqq(ideal_lab_state()).x_cqq);
}

TEST(Distillation, CalibratedStateNearLabValues) {
  const DistillationTable t = distillation_analysis(calibrated_lab_state(), Basis::Z, Basis::Y);
  EXPECT_NEAR(t.identical.x_cqq, 0.693, 0.05);
  EXPECT_NEAR(t.average_rate, 0.354, 0.05);
}

TEST(Distillation, ProductStateHasNoRate) {
  std::mt19937_64 rng(36);
  const DensityMatrix a(QOperator({"A", "A'"}, oracle::random_density(4, 2, rng)));
  const DensityMatrix b(QOperator({"B", "B'"}, oracle::random_density(4, 2, rng)));
  const DensityMatrix product(tensor(a, b).op().reordered(kSystemLabels));
  for (Basis s : kAllBases) {
    const DistillationTable t = distillation_analysis(product, s);
    EXPECT_LE(t.identical.x_cqq, 1e-9);
    EXPECT_LE(t.opposite.x_cqq, 1e-9);
  }
}

TEST(Distillation, PropertyAverageNeverBeatsTheDirectRate) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int c = 0; c < kCases; ++c) {
    NoiseModel m;
    // noisy variants of the lab state around the calibrated point
    m.p_iso = 0.1 * unif(rng);
    m.misalignment["B'"] = 0.5 * unif(rng);
    m.dephasing["A"] = 0.05 * unif(rng);
    const DensityMatrix rho = apply_noise(ideal_lab_state(), m);
    const double x = key_rate_cqq(rho).x_cqq;
    for (Basis s : kAllBases) {
      const DistillationTable t = distillation_analysis(rho, s);
      ASSERT_LE(t.average_rate, x + 1e-9);
      ASSERT_NEAR(t.identical.probability + t.opposite.probability, 1.0, 1e-12);
    }
  }
}

TEST(Entropy, BinaryEntropy) {
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.5), 1.0, 1e-15);
  EXPECT_NEAR(binary_entropy(0.25), kReducedChiE, 1e-15);
}

}  // namespace
}  // namespace shieldlab
