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

#include <random>

#include <benchmark/benchmark.h>

#include "shieldlab/expsim.hpp"
#include "shieldlab/keypipe.hpp"
#include "shieldlab/privacy.hpp"
#include "shieldlab/states.hpp"
#include "shieldlab/tomography.hpp"

namespace {

using namespace shieldlab;

std::vector<CountRecord> lab_records(std::size_t n) {
  SimulationParams p;
  p.seed = 1;
  return simulate_counts(calibrated_lab_state(), schedule_settings(n, 2), p);
}

void BM_PartialTranspose(benchmark::State& state) {
  const DensityMatrix rho = calibrated_lab_state();
  const Label part[] = {"B", "B'"};
  for (auto _ : state) benchmark::DoNotOptimize(partial_transpose(rho.op(), part));
}
BENCHMARK(BM_PartialTranspose);

void BM_KeyRate(benchmark::State& state) {
  const DensityMatrix rho = calibrated_lab_state();
  for (auto _ : state) benchmark::DoNotOptimize(key_rate_cqq(rho));
}
BENCHMARK(BM_KeyRate);

void BM_MlIteration(benchmark::State& state) {
  const auto groups = group_by_setting(lab_records(3000));
  const DensityMatrix rho = calibrated_lab_state();
  for (auto _ : state) {
    const Matrix r = ml_r_operator(rho, groups);
    benchmark::DoNotOptimize(Matrix(r * rho.matrix() * r));
  }
}
BENCHMARK(BM_MlIteration);

void BM_KalmanUpdate(benchmark::State& state) {
  const auto groups = group_by_setting(lab_records(3000));
  for (auto _ : state) {
    KalmanTomography kf;
    kf.update(groups.front());
    benchmark::DoNotOptimize(kf.mean());
  }
}
BENCHMARK(BM_KalmanUpdate)->Unit(benchmark::kMillisecond);

void BM_SliceSweep(benchmark::State& state) {
  const PosteriorSummary post = kf_posterior(lab_records(3000));
  SliceOptions so;
  so.chains = 1;
  so.burn_in = 0;
  so.pilot = 2;
  so.max_lag = 1;
  so.n_samples = 1;
  for (auto _ : state) benchmark::DoNotOptimize(slice_sample(post, so));
  state.SetLabel("3 sweeps per iteration");
}
BENCHMARK(BM_SliceSweep)->Unit(benchmark::kMillisecond);

void BM_ToeplitzHash(benchmark::State& state) {
  std::mt19937_64 rng(3);
  Bits key(static_cast<std::size_t>(state.range(0)));
  for (auto& b : key) b = static_cast<std::uint8_t>(rng() & 1u);
  for (auto _ : state) benchmark::DoNotOptimize(toeplitz_hash(key, key.size() / 2, 4));
}
BENCHMARK(BM_ToeplitzHash)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_ErrorCorrection(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution flip(0.03);
  Bits a(4000), b(4000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<std::uint8_t>(rng() & 1u);
    b[i] = a[i] ^ static_cast<std::uint8_t>(flip(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(error_correct(a, b, 0.03, 6));
}
BENCHMARK(BM_ErrorCorrection)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
