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
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "shieldlab/basis.hpp"
#include "shieldlab/qlinalg.hpp"

namespace shieldlab {

inline constexpr std::size_t kNumAnalyzers = 4;  // A, A', B, B'
inline constexpr std::size_t kNumOutcomes = 16;
inline constexpr std::size_t kNumSettings = 81;

inline constexpr double degrees(double deg) { return deg * std::numbers::pi / 180.0; }

/// Orientation of the quarter- and half-wave plate in one analyzer (radians).
struct WaveplateAngles {
  double quarter = 0.0;
  double half = 0.0;
};

/// Basis choice for each analyzer plus the orientation errors of its plates.
///
/// Outcome index convention: bit value 0 is the +1 eigenvalue port, and the
/// index of a fourfold event is 8 a + 4 a' + 2 b + b'.
struct MeasurementSetting {
  std::array<Basis, kNumAnalyzers> bases{Basis::Z, Basis::Z, Basis::Z, Basis::Z};
  std::array<WaveplateAngles, kNumAnalyzers> perturbation{};

  /// Base-3 code in [0, 81), analyzer A most significant, x=0 y=1 z=2.
  int code() const;
  static MeasurementSetting from_code(int code);
  std::string letters() const;
  static MeasurementSetting from_letters(const std::string& letters);
};

/// One acquisition interval.
struct CountRecord {
  std::size_t index = 0;
  MeasurementSetting setting;
  double duration = 0.0;
  std::array<std::int64_t, kNumOutcomes> counts{};

  std::int64_t total() const;
};

/// Per-analyzer detection efficiencies of the two output ports.
struct EfficiencyMap {
  std::array<std::array<double, 2>, kNumAnalyzers> ports{{{1, 1}, {1, 1}, {1, 1}, {1, 1}}};
  void validate() const;
};

/// Fourfold events of one interval in detection order.
struct EventRecord {
  std::size_t index = 0;
  MeasurementSetting setting;
  std::vector<std::uint8_t> outcomes;
};

/// Plate orientations that make an ideal analyzer measure `basis`.
WaveplateAngles nominal_waveplates(Basis basis);
Matrix quarter_wave_plate(double angle);
Matrix half_wave_plate(double angle);
/// Jones matrix of the analyzer (QWP then HWP) before the polarizer.
Matrix analyzer_unitary(const WaveplateAngles& angles);
/// States projected onto by the +1 and -1 ports.
std::array<Vector, 2> analyzer_kets(Basis basis, const WaveplateAngles& perturbation);

std::array<Vector, kNumOutcomes> povm_kets(const MeasurementSetting& setting);
/// The sixteen rank-1 projectors on (A, A', B, B').
std::vector<QOperator> povm_from_setting(const MeasurementSetting& setting);
std::array<double, kNumOutcomes> born_probabilities(const DensityMatrix& rho, const MeasurementSetting& setting);

/// i.i.d. uniform draws over the 81 basis combinations.
std::vector<MeasurementSetting> schedule_settings(std::size_t n_intervals, std::uint64_t seed);

struct SimulationParams {
  double rate = 2.0;        // fourfold coincidences per second
  double duration = 10.0;   // seconds per interval
  double angle_sigma = degrees(0.25);
  std::uint64_t seed = 0;
  /// Fixed orientation offsets added to every interval (miscalibration).
  std::array<WaveplateAngles, kNumAnalyzers> systematic{};
};

/// Poissonian fourfold counts; each interval uses an RNG derived from
/// (seed, interval index) and redraws its plate errors ~ Normal(0, angle_sigma).
std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, const std::vector<MeasurementSetting>& schedule,
                                         const SimulationParams& params);

/// Expands count histograms into per-interval event lists in random order.
std::vector<EventRecord> expand_events(const std::vector<CountRecord>& records, std::uint64_t seed);

/// Binomial loss with probability prod_q eff[q][bit_q] per fourfold event.
std::vector<CountRecord> apply_detection_efficiency(const std::vector<CountRecord>& records,
                                                    const EfficiencyMap& eff, std::uint64_t seed);

/// Binomial thinning that equalizes the two ports of every analyzer to its
/// lower efficiency: bin k is kept with probability prod_q min_q / eff[q][bit_q].
std::vector<CountRecord> equalize_efficiency(const std::vector<CountRecord>& records, const EfficiencyMap& eff,
                                             std::uint64_t seed);

/// Outcome bit of analyzer q (0 = A ... 3 = B') in a fourfold outcome index.
inline int outcome_bit(std::size_t outcome, std::size_t analyzer) {
  return static_cast<int>((outcome >> (kNumAnalyzers - 1 - analyzer)) & 1u);
}

}  // namespace shieldlab
