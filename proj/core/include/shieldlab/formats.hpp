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

#include "shieldlab/expsim.hpp"
#include "shieldlab/keypipe.hpp"
#include "shieldlab/qlinalg.hpp"
#include "shieldlab/tomography.hpp"

namespace shieldlab {

/// Significant digits for every float written to a data file.
inline constexpr int kOutputDigits = 12;

std::string format_double(double x, int digits = kOutputDigits);

/// "0.690(7)": mean with the standard deviation in units of the last digit.
std::string format_uncertainty(double mean, double stddev);

// Count records: "<index> <letters> <duration> <16 counts>", one per line.
// Plate perturbations are not stored; readers see the nominal setting.
std::string format_count_record(const CountRecord& record);
CountRecord parse_count_record(const std::string& line);
void write_count_records(std::ostream& out, const std::vector<CountRecord>& records);
std::vector<CountRecord> read_count_records(std::istream& in);

// Event stream: "<index> <letters> <n> <outcome>...", outcomes in detection order.
void write_events(std::ostream& out, const std::vector<EventRecord>& events);
std::vector<EventRecord> read_events(std::istream& in);

// Operator: "operator <labels...>" then one line per row of (re im) pairs.
void write_operator(std::ostream& out, const QOperator& op);
QOperator read_operator(std::istream& in);

// Ensemble: header line, then one generalized Bloch vector per member.
void write_ensemble(std::ostream& out, const StateEnsemble& ensemble);
StateEnsemble read_ensemble(std::istream& in);

// Posterior: header, mean line, then the lower triangle of the covariance.
void write_posterior(std::ostream& out, const PosteriorSummary& posterior);
PosteriorSummary read_posterior(std::istream& in);

// Transcript: append-only message log followed by the keys in hex.
void write_transcript(std::ostream& out, const KeyTranscript& transcript);

}  // namespace shieldlab
