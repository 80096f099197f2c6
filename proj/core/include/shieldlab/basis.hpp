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
#include <string_view>

#include "shieldlab/qlinalg.hpp"

namespace shieldlab {

/// Pauli eigenbasis used by a polarization analyzer or a key measurement.
enum class Basis { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Basis, 3> kAllBases = {Basis::X, Basis::Y, Basis::Z};

char basis_letter(Basis b);
Basis basis_from_letter(char c);

/// Eigenvectors of the Pauli operator; index 0 is the +1 eigenvector. For Y
/// these are (|0> + i(-1)^v |1>)/sqrt(2).
std::array<Vector, 2> basis_kets(Basis b);

/// Canonical label list of the four-qubit system.
inline const Labels kSystemLabels = {"A", "A'", "B", "B'"};
inline const Labels kKeyLabels = {"A", "B"};
inline const Labels kShieldLabels = {"A'", "B'"};

}  // namespace shieldlab
