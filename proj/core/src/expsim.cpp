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

#include "shieldlab/expsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "shieldlab/errors.hpp"
#include "shieldlab/seeding.hpp"

namespace shieldlab {
namespace {

Matrix rotation(double angle) {
  Matrix r(2, 2);
  const double c = std::cos(angle), s = std::sin(angle);
  r << c, -s, s, c;
  return r;
}

Matrix retarder(double angle, double retardance) {
  Matrix d = Matrix::Identity(2, 2);
  d(1, 1) = std::polar(1.0, retardance);
  return rotation(angle) * d * rotation(-angle);
}

void require_canonical(const DensityMatrix& rho) {
  if (rho.labels() != kSystemLabels) throw InvalidArgument("expected a state on (A, A', B, B')");
}

}  // namespace

int MeasurementSetting::code() const {
  int c = 0;
  for (Basis b : bases) c = 3 * c + static_cast<int>(b);
  return c;
}

MeasurementSetting MeasurementSetting::from_code(int code) {
  if (code < 0 || code >= static_cast<int>(kNumSettings)) throw InvalidArgument("setting code out of range");
  MeasurementSetting s;
  for (int q = static_cast<int>(kNumAnalyzers) - 1; q >= 0; --q) {
    s.bases[static_cast<std::size_t>(q)] = static_cast<Basis>(code % 3);
    code /= 3;
  }
  return s;
}

std::string MeasurementSetting::letters() const {
  std::string s;
  for (Basis b : bases) s.push_back(basis_letter(b));
  return s;
}

MeasurementSetting MeasurementSetting::from_letters(const std::string& letters) {
  if (letters.size() != kNumAnalyzers) throw InvalidArgument("setting needs four basis letters");
  MeasurementSetting s;
  for (std::size_t q = 0; q < kNumAnalyzers; ++q) s.bases[q] = basis_from_letter(letters[q]);
  return s;
}

std::int64_t CountRecord::total() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

void EfficiencyMap::validate() const {
  for (const auto& a : ports) {
    for (double e : a) {
      if (!(e > 0.0 && e <= 1.0)) throw InvalidArgument("detection efficiencies must lie in (0, 1]");
    }
  }
}

WaveplateAngles nominal_waveplates(Basis basis) {
  switch (basis) {
    case Basis::X: return {degrees(45.0), degrees(22.5)};
    case Basis::Y: return {degrees(45.0), 0.0};
    case Basis::Z: return {0.0, 0.0};
  }
  return {};
}

Matrix quarter_wave_plate(double angle) { return retarder(angle, std::numbers::pi / 2); }
Matrix half_wave_plate(double angle) { return retarder(angle, std::numbers::pi); }

Matrix analyzer_unitary(const WaveplateAngles& angles) {
  return half_wave_plate(angles.half) * quarter_wave_plate(angles.quarter);
}

std::array<Vector, 2> analyzer_kets(Basis basis, const WaveplateAngles& perturbation) {
  const WaveplateAngles nominal = nominal_waveplates(basis);
  const Matrix u = analyzer_unitary({nominal.quarter + perturbation.quarter, nominal.half + perturbation.half});
  const Matrix back = u.adjoint();
  return {back.col(0), back.col(1)};
}

std::array<Vector, kNumOutcomes> povm_kets(const MeasurementSetting& setting) {
  std::array<std::array<Vector, 2>, kNumAnalyzers> local;
  for (std::size_t q = 0; q < kNumAnalyzers; ++q) {
    local[q] = analyzer_kets(setting.bases[q], setting.perturbation[q]);
  }
  std::array<Vector, kNumOutcomes> kets;
  for (std::size_t k = 0; k < kNumOutcomes; ++k) {
    Vector v(16);
    for (std::size_t i = 0; i < 16; ++i) {
      Complex amp = 1.0;
      for (std::size_t q = 0; q < kNumAnalyzers; ++q) {
        amp *= local[q][static_cast<std::size_t>(outcome_bit(k, q))](outcome_bit(i, q));
      }
      v(static_cast<Eigen::Index>(i)) = amp;
    }
    kets[k] = std::move(v);
  }
  return kets;
}

std::vector<QOperator> povm_from_setting(const MeasurementSetting& setting) {
  std::vector<QOperator> out;
  out.reserve(kNumOutcomes);
  for (const auto& v : povm_kets(setting)) out.push_back(QOperator::projector(kSystemLabels, v));
  return out;
}

std::array<double, kNumOutcomes> born_probabilities(const DensityMatrix& rho, const MeasurementSetting& setting) {
  require_canonical(rho);
  std::array<double, kNumOutcomes> p{};
  const auto kets = povm_kets(setting);
  for (std::size_t k = 0; k < kNumOutcomes; ++k) {
    p[k] = std::max(0.0, kets[k].dot(rho.matrix() * kets[k]).real());
  }
  return p;
}

std::vector<MeasurementSetting> schedule_settings(std::size_t n_intervals, std::uint64_t seed) {
  if (n_intervals == 0) throw InvalidArgument("schedule needs at least one interval");
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(kNumSettings) - 1);
  std::vector<MeasurementSetting> out;
  out.reserve(n_intervals);
  for (std::size_t i = 0; i < n_intervals; ++i) out.push_back(MeasurementSetting::from_code(pick(rng)));
  return out;
}

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, const std::vector<MeasurementSetting>& schedule,
                                         const SimulationParams& params) {
  require_canonical(rho);
  if (!(params.rate >= 0.0)) throw InvalidArgument("negative coincidence rate");
  if (!(params.duration >= 0.0)) throw InvalidArgument("negative interval duration");
  if (!(params.angle_sigma >= 0.0)) throw InvalidArgument("negative angle sigma");
  const double mean_total = params.rate * params.duration;

  std::vector<CountRecord> records(schedule.size());
  parallel_for(schedule.size(), [&](std::size_t i) {
    Rng rng = make_rng(derive_seed(params.seed, static_cast<std::uint64_t>(i)));
    CountRecord& rec = records[i];
    rec.index = i;
    rec.duration = params.duration;
    rec.setting = schedule[i];
    MeasurementSetting actual = schedule[i];
    std::normal_distribution<double> jitter(0.0, params.angle_sigma);
    for (std::size_t q = 0; q < kNumAnalyzers; ++q) {
      auto& w = actual.perturbation[q];
      w.quarter += params.systematic[q].quarter;
      w.half += params.systematic[q].half;
      if (params.angle_sigma > 0.0) {
        w.quarter += jitter(rng);
        w.half += jitter(rng);
      }
    }
    rec.setting.perturbation = actual.perturbation;
    const auto probs = born_probabilities(rho, actual);
    for (std::size_t k = 0; k < kNumOutcomes; ++k) {
      const double mean = mean_total * probs[k];
      if (mean > 0.0) {
        std::poisson_distribution<std::int64_t> draw(mean);
        rec.counts[k] = draw(rng);
      }
    }
  });
  return records;
}

std::vector<EventRecord> expand_events(const std::vector<CountRecord>& records, std::uint64_t seed) {
  std::vector<EventRecord> out(records.size());
  parallel_for(records.size(), [&](std::size_t i) {
    const CountRecord& rec = records[i];
    EventRecord& ev = out[i];
    ev.index = rec.index;
    ev.setting = rec.setting;
    ev.outcomes.reserve(static_cast<std::size_t>(rec.total()));
    for (std::size_t k = 0; k < kNumOutcomes; ++k) {
      ev.outcomes.insert(ev.outcomes.end(), static_cast<std::size_t>(rec.counts[k]), static_cast<std::uint8_t>(k));
    }
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(rec.index)));
    std::shuffle(ev.outcomes.begin(), ev.outcomes.end(), rng);
  });
  return out;
}

namespace {

std::vector<CountRecord> thin(const std::vector<CountRecord>& records, const std::array<double, kNumOutcomes>& keep,
                              std::uint64_t seed) {
  std::vector<CountRecord> out = records;
  for (auto& rec : out) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(rec.index)));
    for (std::size_t k = 0; k < kNumOutcomes; ++k) {
      if (keep[k] >= 1.0 || rec.counts[k] == 0) continue;
      std::binomial_distribution<std::int64_t> draw(rec.counts[k], keep[k]);
      rec.counts[k] = draw(rng);
    }
  }
  return out;
}

}  // namespace

std::vector<CountRecord> apply_detection_efficiency(const std::vector<CountRecord>& records,
                                                    const EfficiencyMap& eff, std::uint64_t seed) {
  eff.validate();
  std::array<double, kNumOutcomes> keep{};
  for (std::size_t k = 0; k < kNumOutcomes; ++k) {
    keep[k] = 1.0;
    for (std::size_t q = 0; q < kNumAnalyzers; ++q) keep[k] *= eff.ports[q][static_cast<std::size_t>(outcome_bit(k, q))];
  }
  return thin(records, keep, seed);
}

std::vector<CountRecord> equalize_efficiency(const std::vector<CountRecord>& records, const EfficiencyMap& eff,
                                             std::uint64_t seed) {
  eff.validate();
  std::array<double, kNumOutcomes> keep{};
  for (std::size_t k = 0; k < kNumOutcomes; ++k) {
    keep[k] = 1.0;
    for (std::size_t q = 0; q < kNumAnalyzers; ++q) {
      const double lowest = std::min(eff.ports[q][0], eff.ports[q][1]);
      keep[k] *= lowest / eff.ports[q][static_cast<std::size_t>(outcome_bit(k, q))];
    }
  }
  return thin(records, keep, seed);
}

}  // namespace shieldlab
