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
#include <optional>
#include <string>
#include <vector>

#include "shieldlab/basis.hpp"
#include "shieldlab/qlinalg.hpp"
#include "shieldlab/states.hpp"

namespace shieldlab::cli {

struct StateSpec {
  std::string name = "gamma-lab-calibrated";
  NoiseModel noise;  // applied on top of the named state
};

struct RunConfig {
  StateSpec state;
  std::size_t n_intervals = 33637;
  double rate = 2.0;               // fourfolds per second
  double duration = 10.0;          // seconds per interval
  double angle_sigma_deg = 0.25;
  double systematic_quarter_deg = 0.0;  // fixed plate offsets on every analyzer
  double systematic_half_deg = 0.0;
  std::vector<std::string> methods{"kf", "ml"};
  std::size_t kf_samples = 10000;
  std::size_t ml_bootstrap = 50;
  Basis key_basis = Basis::Y;
  double epsilon = 1e-6;
  double sigma_margin = 5.0;
  std::optional<std::uint64_t> seed;
  std::string output_dir = "shieldlab-out";

  /// Throws InvalidArgument on any out-of-range field or a missing seed.
  void validate() const;
  bool uses(const std::string& method) const;
  std::uint64_t master_seed() const;
};

/// Reads a JSON config; unknown keys are rejected.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);
std::string to_json(const RunConfig& config);

DensityMatrix build_state(const StateSpec& spec);

}  // namespace shieldlab::cli
