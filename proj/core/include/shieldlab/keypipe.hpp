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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "shieldlab/basis.hpp"
#include "shieldlab/expsim.hpp"
#include "shieldlab/tomography.hpp"

namespace shieldlab {

using Bits = std::vector<std::uint8_t>;

struct SiftedKey {
  Bits alice;
  Bits bob;
  std::vector<std::size_t> intervals;  // interval index of each bit
  /// Intervals that passed the basis filter and held at least one event.
  std::size_t compatible_intervals = 0;
};

/// One uniformly chosen event per interval in which A and B were both
/// measured in `key_basis`; the bits are the A and B outcomes.
SiftedKey sift(const std::vector<EventRecord>& events, Basis key_basis, std::uint64_t seed);

/// Same event choice as sift(), restricted to intervals where A' and B' were
/// measured in a common basis; the bit pair is kept only when the shield
/// outcomes agree. compatible_intervals counts the restricted intervals, so
/// raw length / compatible_intervals estimates the distillation success rate.
SiftedKey sift_distilled(const std::vector<EventRecord>& events, Basis key_basis, std::uint64_t seed);

// --- Error correction ---------------------------------------------------------

enum class MessageKind { ParityRequest, ParityReply, HashRequest, HashReply };

/// One message on the public channel. Parities and hash bits are the only
/// payloads that carry information about the key.
struct Message {
  MessageKind kind = MessageKind::ParityRequest;
  std::uint32_t round = 0;           // 1..passes for block passes, passes+1 for subset checks
  std::uint32_t id = 0;
  std::vector<std::uint32_t> positions;
  std::uint64_t seed = 0;            // hash request
  std::uint64_t payload = 0;         // parity bit or 64-bit hash
  std::uint32_t disclosed_bits = 0;  // bits of `payload` revealed
};

struct EcOptions {
  std::size_t passes = 4;
  double block_factor = 0.73;          // first block size = block_factor / qber
  std::size_t min_block = 4;
  std::size_t subset_agreements = 20;  // consecutive clean random-subset checks to stop
  std::size_t max_subset_checks = 100000;
  std::uint32_t hash_bits = 64;
};

struct EcResult {
  Bits corrected;
  std::vector<Message> log;        // every message in channel order
  std::size_t leak = 0;            // disclosed parity and hash bits
  std::size_t corrections = 0;     // bits flipped on Bob's side
  std::size_t first_block = 0;
};

/// First-pass block size for a QBER estimate.
std::size_t initial_block_size(double qber, std::size_t n, const EcOptions& options = {});

/// Binary interactive reconciliation: block passes with random permutations
/// and bisection, random-subset parity checks, then a hash comparison.
/// Throws ReconciliationFailure when the final hashes differ.
EcResult error_correct(const Bits& alice, const Bits& bob, double qber_estimate, std::uint64_t seed,
                       const EcOptions& options = {});

/// Parity of the given positions.
std::uint8_t parity(const Bits& key, const std::vector<std::uint32_t>& positions);

/// Random-subset parity hash; bit j is the parity of a subset drawn from (seed, j).
std::uint64_t subset_hash(const Bits& key, std::uint64_t seed, std::uint32_t bits);

// --- Privacy amplification ----------------------------------------------------

/// floor(n (1 - chi_E_bound) - leak - 2 log2(1 / epsilon)), or 0 if negative.
std::size_t secure_length(std::size_t n, double chi_E_bound, double leak, double epsilon);

/// Output = T key over GF(2) with T the l x n Toeplitz matrix defined by
/// n + l - 1 seeded random bits: T(i, j) = r[i - j + n - 1].
Bits toeplitz_hash(const Bits& key, std::size_t out_length, std::uint64_t seed);

Bits privacy_amplify(const Bits& key, double chi_E_bound, double leak, double epsilon, std::uint64_t seed);

/// mean + sigma_margin * std of chi_E over the ensemble, clipped to [0, 1].
double chi_E_bound_from_ensemble(const StateEnsemble& ensemble, Basis key_basis, double sigma_margin = 5.0);

/// Same bound for the identical-shield-outcome branch: for each shield basis
/// the conditional AB state of every member is evaluated, and the largest
/// per-basis bound is returned.
double distilled_chi_E_bound(const StateEnsemble& ensemble, Basis key_basis, double sigma_margin = 5.0);

// --- Pipelines ----------------------------------------------------------------

enum class KeyMethod { Direct, Distilled };

struct KeygenOptions {
  Basis key_basis = Basis::Y;
  double epsilon = 1e-6;
  double sigma_margin = 5.0;
  double sample_fraction = 0.05;  // raw bits disclosed to estimate the QBER
  std::uint64_t seed = 0;
  EcOptions ec;
};

struct KeyTranscript {
  KeyMethod method = KeyMethod::Direct;
  Bits raw_alice;
  Bits raw_bob;
  std::size_t compatible_intervals = 0;
  std::size_t sample_size = 0;
  std::size_t sample_errors = 0;
  double qber_estimate = 0.0;
  std::vector<Message> log;
  std::size_t ec_leak = 0;       // parity and hash bits
  std::size_t leak = 0;          // ec_leak + disclosed sample bits
  std::size_t corrections = 0;
  Bits alice_key;      // Alice's bits outside the disclosed sample
  Bits corrected;      // Bob's bits after error correction
  Bits final_key;      // hashed from alice_key
  Bits final_key_bob;  // hashed from corrected
  double epsilon = 0.0;
  double chi_E_bound = 0.0;
  std::string margin_formula;

  std::size_t raw_length() const { return raw_alice.size(); }
};

/// QBER sampling, error correction and privacy amplification on a sifted key.
KeyTranscript run_key_pipeline(const SiftedKey& sifted, double chi_E_bound, const KeygenOptions& options);

KeyTranscript direct_keygen(const std::vector<EventRecord>& events, const StateEnsemble& ensemble,
                            const KeygenOptions& options);

KeyTranscript distilled_keygen(const std::vector<EventRecord>& events, const StateEnsemble& ensemble,
                               const KeygenOptions& options);

std::string to_hex(const Bits& bits);

}  // namespace shieldlab
