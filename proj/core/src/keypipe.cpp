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

#include "shieldlab/keypipe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "shieldlab/errors.hpp"
#include "shieldlab/privacy.hpp"
#include "shieldlab/seeding.hpp"
#include "shieldlab/states.hpp"

namespace shieldlab {
namespace {

constexpr std::size_t kA = 0, kAp = 1, kB = 2, kBp = 3;

template <typename Keep>
SiftedKey sift_with(const std::vector<EventRecord>& events, Basis key_basis, std::uint64_t seed, Keep keep) {
  SiftedKey out;
  const std::uint64_t stage = derive_seed(seed, "sift");
  for (const auto& rec : events) {
    const auto& b = rec.setting.bases;
    if (b[kA] != key_basis || b[kB] != key_basis || rec.outcomes.empty()) continue;
    if (!keep.accepts_setting(rec.setting)) continue;
    ++out.compatible_intervals;
    Rng rng = make_rng(derive_seed(stage, static_cast<std::uint64_t>(rec.index)));
    std::uniform_int_distribution<std::size_t> pick(0, rec.outcomes.size() - 1);
    const std::size_t o = rec.outcomes[pick(rng)];
    if (!keep.accepts_outcome(o)) continue;
    out.alice.push_back(static_cast<std::uint8_t>(outcome_bit(o, kA)));
    out.bob.push_back(static_cast<std::uint8_t>(outcome_bit(o, kB)));
    out.intervals.push_back(rec.index);
  }
  return out;
}

struct KeepAll {
  bool accepts_setting(const MeasurementSetting&) const { return true; }
  bool accepts_outcome(std::size_t) const { return true; }
};

struct KeepIdenticalShield {
  bool accepts_setting(const MeasurementSetting& s) const { return s.bases[kAp] == s.bases[kBp]; }
  bool accepts_outcome(std::size_t o) const { return outcome_bit(o, kAp) == outcome_bit(o, kBp); }
};

DensityMatrix identical_branch(const DensityMatrix& rho, Basis shield_basis) {
  Matrix acc = Matrix::Zero(4, 4);
  double total = 0.0;
  for (int v = 0; v < 2; ++v) {
    const double p = shield_outcome_probability(rho, shield_basis, {v, v});
    if (p < 1e-12) continue;
    const ShieldOutcome s = condition_on_shield(rho, shield_basis, {v, v});
    acc += s.probability * s.state.matrix();
    total += s.probability;
  }
  if (total < 1e-12) throw NumericalError("identical shield outcomes have zero probability");
  return DensityMatrix::from_numeric(QOperator(kKeyLabels, acc / total));
}

double clip_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

SiftedKey sift(const std::vector<EventRecord>& events, Basis key_basis, std::uint64_t seed) {
  return sift_with(events, key_basis, seed, KeepAll{});
}

SiftedKey sift_distilled(const std::vector<EventRecord>& events, Basis key_basis, std::uint64_t seed) {
  return sift_with(events, key_basis, seed, KeepIdenticalShield{});
}

std::size_t secure_length(std::size_t n, double chi_E_bound, double leak, double epsilon) {
  if (!(chi_E_bound >= 0.0 && chi_E_bound <= 1.0)) throw InvalidArgument("chi_E bound must lie in [0, 1]");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidArgument("epsilon must lie in (0, 1]");
  if (!(leak >= 0.0)) throw InvalidArgument("leak must be nonnegative");
  const double l = std::floor(static_cast<double>(n) * (1.0 - chi_E_bound) - leak - 2.0 * std::log2(1.0 / epsilon));
  return l > 0.0 ? static_cast<std::size_t>(l) : 0;
}

Bits toeplitz_hash(const Bits& key, std::size_t out_length, std::uint64_t seed) {
  const std::size_t n = key.size();
  if (out_length == 0 || n == 0) return {};
  // out_i = XOR_t r[i + t] kr[t] with kr the reversed key
  const std::size_t key_words = (n + 63) / 64;
  std::vector<std::uint64_t> kr(key_words, 0);
  for (std::size_t t = 0; t < n; ++t) kr[t / 64] |= static_cast<std::uint64_t>(key[n - 1 - t] & 1u) << (t % 64);

  const std::size_t r_bits = n + out_length - 1;
  std::vector<std::uint64_t> r((r_bits + 63) / 64 + 2, 0);
  Rng rng = make_rng(seed);
  for (std::size_t w = 0; w * 64 < r_bits; ++w) r[w] = rng();
  if (r_bits % 64) r[r_bits / 64] &= (std::uint64_t{1} << (r_bits % 64)) - 1;

  auto window = [&](std::size_t offset) {
    const std::size_t w = offset / 64, s = offset % 64;
    return s == 0 ? r[w] : (r[w] >> s) | (r[w + 1] << (64 - s));
  };
  Bits out(out_length);
  for (std::size_t i = 0; i < out_length; ++i) {
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < key_words; ++w) acc ^= window(i + 64 * w) & kr[w];
    out[i] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
  }
  return out;
}

Bits privacy_amplify(const Bits& key, double chi_E_bound, double leak, double epsilon, std::uint64_t seed) {
  return toeplitz_hash(key, secure_length(key.size(), chi_E_bound, leak, epsilon), seed);
}

double chi_E_bound_from_ensemble(const StateEnsemble& ensemble, Basis key_basis, double sigma_margin) {
  if (ensemble.members.empty()) throw InvalidArgument("chi_E bound: empty ensemble");
  const FunctionalStats s =
      functional_stats(ensemble, [&](const DensityMatrix& rho) { return holevo_chi_E(rho, key_basis).chi; });
  return clip_unit(s.mean + sigma_margin * s.stddev);
}

double distilled_chi_E_bound(const StateEnsemble& ensemble, Basis key_basis, double sigma_margin) {
  if (ensemble.members.empty()) throw InvalidArgument("chi_E bound: empty ensemble");
  double bound = 0.0;
  for (Basis shield : kAllBases) {
    const FunctionalStats s = functional_stats(ensemble, [&](const DensityMatrix& rho) {
      return holevo_chi_E(identical_branch(rho, shield), key_basis).chi;
    });
    bound = std::max(bound, clip_unit(s.mean + sigma_margin * s.stddev));
  }
  return bound;
}

KeyTranscript run_key_pipeline(const SiftedKey& sifted, double chi_E_bound, const KeygenOptions& options) {
  if (sifted.alice.size() != sifted.bob.size()) throw InvalidArgument("sifted keys differ in length");
  if (!(options.sample_fraction >= 0.0 && options.sample_fraction < 1.0)) {
    throw InvalidArgument("sample fraction must lie in [0, 1)");
  }
  KeyTranscript t;
  t.raw_alice = sifted.alice;
  t.raw_bob = sifted.bob;
  t.compatible_intervals = sifted.compatible_intervals;
  t.epsilon = options.epsilon;
  t.chi_E_bound = chi_E_bound;
  t.margin_formula = "l = floor(n (1 - chi_E_bound) - leak - 2 log2(1/epsilon))";
  const std::size_t n_raw = sifted.alice.size();
  if (n_raw == 0) return t;

  // disclosed QBER sample
  std::vector<std::size_t> order(n_raw);
  for (std::size_t i = 0; i < n_raw; ++i) order[i] = i;
  Rng rng = make_rng(derive_seed(options.seed, "qber-sample"));
  std::shuffle(order.begin(), order.end(), rng);
  t.sample_size = std::min(n_raw, static_cast<std::size_t>(std::ceil(options.sample_fraction * n_raw)));
  std::vector<std::uint8_t> sampled(n_raw, 0);
  for (std::size_t i = 0; i < t.sample_size; ++i) {
    sampled[order[i]] = 1;
    if (sifted.alice[order[i]] != sifted.bob[order[i]]) ++t.sample_errors;
  }
  t.qber_estimate = t.sample_size ? static_cast<double>(t.sample_errors) / static_cast<double>(t.sample_size) : 0.0;

  Bits alice, bob;
  for (std::size_t i = 0; i < n_raw; ++i) {
    if (sampled[i]) continue;
    alice.push_back(sifted.alice[i]);
    bob.push_back(sifted.bob[i]);
  }

  // block sizing uses a smoothed estimate so an error-free sample still gives finite blocks
  const double sizing_qber = (static_cast<double>(t.sample_errors) + 1.0) / (static_cast<double>(t.sample_size) + 2.0);
  EcResult ec = error_correct(alice, bob, sizing_qber, derive_seed(options.seed, "ec"), options.ec);
  t.log = std::move(ec.log);
  t.ec_leak = ec.leak;
  t.leak = ec.leak + t.sample_size;
  t.corrections = ec.corrections;
  t.corrected = std::move(ec.corrected);
  t.alice_key = std::move(alice);
  const std::uint64_t pa_seed = derive_seed(options.seed, "privacy-amplification");
  t.final_key = privacy_amplify(t.alice_key, chi_E_bound, static_cast<double>(t.leak), options.epsilon, pa_seed);
  t.final_key_bob = privacy_amplify(t.corrected, chi_E_bound, static_cast<double>(t.leak), options.epsilon, pa_seed);
  return t;
}

KeyTranscript direct_keygen(const std::vector<EventRecord>& events, const StateEnsemble& ensemble,
                            const KeygenOptions& options) {
  const double bound = chi_E_bound_from_ensemble(ensemble, options.key_basis, options.sigma_margin);
  KeyTranscript t = run_key_pipeline(sift(events, options.key_basis, options.seed), bound, options);
  t.method = KeyMethod::Direct;
  return t;
}

KeyTranscript distilled_keygen(const std::vector<EventRecord>& events, const StateEnsemble& ensemble,
                               const KeygenOptions& options) {
  const double bound = distilled_chi_E_bound(ensemble, options.key_basis, options.sigma_margin);
  KeyTranscript t = run_key_pipeline(sift_distilled(events, options.key_basis, options.seed), bound, options);
  t.method = KeyMethod::Distilled;
  return t;
}

std::string to_hex(const Bits& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve((bits.size() + 3) / 4);
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) nibble = (nibble << 1) | (i + j < bits.size() ? (bits[i + j] & 1) : 0);
    out.push_back(kDigits[nibble]);
  }
  return out;
}

}  // namespace shieldlab
