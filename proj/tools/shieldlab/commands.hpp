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

#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace shieldlab::cli {

// Every command writes its files under config.output_dir and a summary to
// `out`. Errors propagate as shieldlab exceptions; main() maps them to exit codes.

void cmd_simulate(const RunConfig& config, std::ostream& out);
void cmd_reconstruct(const RunConfig& config, const std::string& records_path, std::ostream& out);
void cmd_sample(const RunConfig& config, const std::string& posterior_path, std::ostream& out);
void cmd_report(const RunConfig& config, const std::vector<std::string>& ensemble_paths,
                const std::string& reference_state, std::ostream& out);
void cmd_keygen(const RunConfig& config, const std::string& events_path, const std::string& ensemble_path,
                const std::string& method, std::ostream& out);
void cmd_distill(const RunConfig& config, const std::string& ensemble_path, std::ostream& out);
void cmd_repro(const RunConfig& config, std::ostream& out);

}  // namespace shieldlab::cli
