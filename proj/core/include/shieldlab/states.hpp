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

#include <map>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "shieldlab/basis.hpp"
#include "shieldlab/qlinalg.hpp"

namespace shieldlab {

enum class Bell { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

Vector bell_vector(Bell kind);
DensityMatrix bell(Bell kind, const Label& first, const Label& second);

/// 1/4 |phi-><phi-|_AB (x) rho_- + 3/4 |phi+><phi+|_AB (x) rho_+ on (A, A', B, B'),
/// with rho_- the singlet and rho_+ the normalized triplet projector on A'B'.
DensityMatrix ideal_private_state();

/// Same mixture with |psi+> in place of |phi+> on AB: the state produced by
/// the random Pauli preparation.
DensityMatrix ideal_lab_state();

/// Local unitary W on (A, B) with W ideal_lab_state() W^dagger = ideal_private_state():
/// sqrt(sigma_x) = H S H on both key qubits.
QOperator lab_to_private_unitary();

/// |phi+>_AB (x) |phi+>_A'B' in canonical label order.
DensityMatrix source_state();

/// One term of a random-unitary preparation: with `probability` apply the
/// tensor product of the listed single- or multi-qubit unitaries.
struct MixingBranch {
  double probability = 0.0;
  std::vector<QOperator> unitaries;
};

/// sum_k p_k U_k rho U_k^dagger. Throws InvalidArgument unless the
/// probabilities are non-negative and sum to 1 within 1e-12.
DensityMatrix prepare_by_mixing(const DensityMatrix& base, std::span<const MixingBranch> branches);

/// The four equiprobable settings of the B and B' waveplates.
std::vector<MixingBranch> lab_preparation_branches();

/// Preparation imperfections, applied in order: coherent misalignment
/// (exp(-i theta sigma_z / 2) on each listed qubit), per-qubit dephasing
/// rho -> (1 - r/2) rho + (r/2) Z rho Z, then isotropic mixing with I/d.
struct NoiseModel {
  double p_iso = 0.0;
  std::map<Label, double> dephasing;
  std::map<Label, double> misalignment;

  /// Throws InvalidArgument for weights outside [0, 1] or non-finite angles.
  void validate() const;
  bool is_identity() const;
};

/// The channel as a linear map on arbitrary operators.
QOperator apply_noise_map(const QOperator& op, const NoiseModel& model);
DensityMatrix apply_noise(const DensityMatrix& rho, const NoiseModel& model);

/// Bisection on p_iso (other knobs fixed) so that F(target, noisy(target))
/// equals `target_fidelity`. Throws NumericalError if the target is not
/// bracketed by p_iso in [0, 1].
double calibrate_isotropic(const DensityMatrix& target, const NoiseModel& model,
                           double target_fidelity, double tol = 1e-12);

/// Fidelity target for the calibrated lab state.
inline constexpr double kLabFidelity = 0.9724;
/// Fixed shield misalignment used by the calibrated lab state (radians on B').
inline constexpr double kLabShieldMisalignment = 0.4;

/// Misalignment on B' plus isotropic noise bisected to F = kLabFidelity.
NoiseModel calibrated_lab_noise();
DensityMatrix calibrated_lab_state();

struct ShieldOutcome {
  double probability = 0.0;
  DensityMatrix state;  // on (A, B)
};

/// Projects A' and B' onto the given eigenvectors of `basis` (bit 0 = +1
/// eigenvector) and returns the normalized post-measurement state of AB.
/// Throws NumericalError if the outcome probability is below 1e-12.
ShieldOutcome condition_on_shield(const DensityMatrix& rho, Basis basis, std::pair<int, int> outcome);

/// Probability of outcome (a', b') without forming the conditional state.
double shield_outcome_probability(const DensityMatrix& rho, Basis basis, std::pair<int, int> outcome);

/// Named-state registry: "gamma", "gamma-lab", "gamma-lab-noisy(p)",
/// "gamma-lab-calibrated", "source", "mixed", "bell:phi+", "bell:phi-",
/// "bell:psi+", "bell:psi-".
DensityMatrix named_state(std::string_view name);

}  // namespace shieldlab
