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
#include <functional>
#include <random>
#include <string_view>

namespace shieldlab {

using Rng = std::mt19937_64;

/// Seed for a named stage, derived from the master seed by hashing the label.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);
/// Seed for the i-th independent stream (interval, replica, chain) of a stage.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

Rng make_rng(std::uint64_t seed);

/// Runs body(i) for i in [0, n) on a fixed pool of worker threads. The body
/// must only write to slot i of its outputs, so results do not depend on the
/// worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Worker count used by parallel_for: SHIELDLAB_THREADS if set, else the
/// hardware concurrency.
std::size_t worker_count();

}  // namespace shieldlab
