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

#include <array>
#include <string>
#include <vector>

#include "shieldlab/basis.hpp"
#include "shieldlab/qlinalg.hpp"

namespace shieldlab {

/// log2 || rho^Gamma ||_1 with the partial transpose taken over `bob_side`.
/// Defaults to the B-side labels present in rho (B, B').
double log_negativity(const DensityMatrix& rho);
double log_negativity(const DensityMatrix& rho, const Labels& bob_side);

/// |v><v| for v = 0, 1 in the eigenbasis of the key observable.
std::array<Matrix, 2> key_measurement_basis(Basis basis);

struct HolevoResult {
  double chi = 0.0;
  std::vector<double> probabilities;          // p_a for a = 0, 1
  std::vector<DensityMatrix> conditionals;    // rho_B^(a), or rho_{rest}^(a) for chi_E
};

/// Holevo quantity of the channel from Alice's key bit (measuring A) to
/// Bob's key qubit B. Outcomes with p_a < 1e-12 are dropped.
HolevoResult holevo_chi_B(const DensityMatrix& rho, Basis key_basis);

/// Holevo quantity of the channel from Alice's key bit to an eavesdropper
/// holding a purification of rho:
///   chi_E = S(rho) - sum_a p_a S(rho_rest^(a)),
/// with rho_rest^(a) the state of every subsystem except A after Alice
/// obtains a. Conditioned on a, the rest plus the purifying system is pure,
/// and unconditionally the purifying system has the spectrum of rho.
HolevoResult holevo_chi_E(const DensityMatrix& rho, Basis key_basis);

struct KeyRateReport {
  double chi_B = 0.0;
  double chi_E = 0.0;
  double x_cqq = 0.0;           // chi_B - chi_E
  double log_negativity = 0.0;
  Basis key_basis = Basis::Y;
  std::vector<double> probabilities;
  double separation = 0.0;      // x_cqq - log_negativity
};

/// Works for states on (A, A', B, B') and on (A, B).
KeyRateReport key_rate_cqq(const DensityMatrix& rho, Basis key_basis = Basis::Y);

struct DistillationBranch {
  double probability = 0.0;
  DensityMatrix state;          // on (A, B)
  double x_cqq = 0.0;           // computed with the shield consumed
};

struct DistillationTable {
  DistillationBranch identical;
  DistillationBranch opposite;
  /// sum over branches of p * max(x_cqq, 0): a branch with a negative rate
  /// is discarded rather than subtracted.
  double average_rate = 0.0;
  Basis shield_basis = Basis::Z;
  Basis key_basis = Basis::Y;
};

/// Measures A' and B' in a common basis and splits on identical vs opposite outcomes.
DistillationTable distillation_analysis(const DensityMatrix& rho, Basis shield_basis, Basis key_basis = Basis::Y);

/// Binary entropy in bits.
double binary_entropy(double p);

}  // namespace shieldlab
