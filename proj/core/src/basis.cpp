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

#include "shieldlab/basis.hpp"

#include <cmath>
#include <string>

#include "shieldlab/errors.hpp"

namespace shieldlab {

char basis_letter(Basis b) {
  switch (b) {
    case Basis::X: return 'x';
    case Basis::Y: return 'y';
    case Basis::Z: return 'z';
  }
  return '?';
}

Basis basis_from_letter(char c) {
  switch (c) {
    case 'x': case 'X': return Basis::X;
    case 'y': case 'Y': return Basis::Y;
    case 'z': case 'Z': return Basis::Z;
    default: throw InvalidArgument(std::string("unknown basis letter '") + c + "'");
  }
}

std::array<Vector, 2> basis_kets(Basis b) {
  const double s = 1.0 / std::sqrt(2.0);
  Vector plus(2), minus(2);
  switch (b) {
    case Basis::X:
      plus << s, s;
      minus << s, -s;
      break;
    case Basis::Y:
      plus << s, Complex(0, s);
      minus << s, Complex(0, -s);
      break;
    case Basis::Z:
      plus << 1, 0;
      minus << 0, 1;
      break;
  }
  return {plus, minus};
}

}  // namespace shieldlab
