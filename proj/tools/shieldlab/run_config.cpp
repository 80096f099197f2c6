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

#include "run_config.hpp"

#include <fstream>
#include <map>
#include <iterator>
#include <set>

#include "json.hpp"

#include "shieldlab/errors.hpp"

namespace shieldlab::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InvalidArgument("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
  }
}

std::map<Label, double> read_map(const json& j, const char* key) {
  std::map<Label, double> m;
  read(j, key, m);
  return m;
}

}  // namespace

void RunConfig::validate() const {
  if (!seed) throw InvalidArgument("config needs a seed");
  if (n_intervals == 0) throw InvalidArgument("n_intervals must be positive");
  if (!(rate > 0.0)) throw InvalidArgument("rate must be positive");
  if (!(duration > 0.0)) throw InvalidArgument("duration must be positive");
  if (!(angle_sigma_deg >= 0.0)) throw InvalidArgument("angle_sigma_deg must be nonnegative");
  if (kf_samples == 0) throw InvalidArgument("kf_samples must be positive");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidArgument("epsilon must lie in (0, 1]");
  if (!(sigma_margin >= 0.0)) throw InvalidArgument("sigma_margin must be nonnegative");
  if (methods.empty()) throw InvalidArgument("at least one tomography method is needed");
  for (const auto& m : methods) {
    if (m != "ml" && m != "kf") throw InvalidArgument("unknown tomography method '" + m + "'");
  }
  if (output_dir.empty()) throw InvalidArgument("output_dir must not be empty");
  state.noise.validate();
}

bool RunConfig::uses(const std::string& method) const {
  for (const auto& m : methods) {
    if (m == method) return true;
  }
  return false;
}

std::uint64_t RunConfig::master_seed() const {
  if (!seed) throw InvalidArgument("config needs a seed");
  return *seed;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  reject_unknown(j,
                 {"state", "n_intervals", "rate", "duration", "angle_sigma_deg", "systematic_quarter_deg",
                  "systematic_half_deg", "methods", "kf_samples", "ml_bootstrap", "key_basis", "epsilon",
                  "sigma_margin", "seed", "output_dir"},
                 "config");
  RunConfig c;
  if (j.contains("state")) {
    const json& s = j.at("state");
    if (s.is_string()) {
      c.state.name = s.get<std::string>();
    } else {
      reject_unknown(s, {"name", "p_iso", "dephasing", "misalignment"}, "state");
      read(s, "name", c.state.name);
      read(s, "p_iso", c.state.noise.p_iso);
      c.state.noise.dephasing = read_map(s, "dephasing");
      c.state.noise.misalignment = read_map(s, "misalignment");
    }
  }
  read(j, "n_intervals", c.n_intervals);
  read(j, "rate", c.rate);
  read(j, "duration", c.duration);
  read(j, "angle_sigma_deg", c.angle_sigma_deg);
  read(j, "systematic_quarter_deg", c.systematic_quarter_deg);
  read(j, "systematic_half_deg", c.systematic_half_deg);
  read(j, "methods", c.methods);
  read(j, "kf_samples", c.kf_samples);
  read(j, "ml_bootstrap", c.ml_bootstrap);
  if (j.contains("key_basis")) {
    const auto b = j.at("key_basis").get<std::string>();
    if (b.size() != 1) throw InvalidArgument("key_basis must be one of x, y, z");
    c.key_basis = basis_from_letter(b[0]);
  }
  read(j, "epsilon", c.epsilon);
  read(j, "sigma_margin", c.sigma_margin);
  if (j.contains("seed")) {
    std::uint64_t s = 0;
    read(j, "seed", s);
    c.seed = s;
  }
  read(j, "output_dir", c.output_dir);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config '" + path + "'");
  return parse_config(std::string(std::istreambuf_iterator<char>(in), {}));
}

std::string to_json(const RunConfig& c) {
  json j;
  j["state"] = {{"name", c.state.name},
                {"p_iso", c.state.noise.p_iso},
                {"dephasing", c.state.noise.dephasing},
                {"misalignment", c.state.noise.misalignment}};
  j["n_intervals"] = c.n_intervals;
  j["rate"] = c.rate;
  j["duration"] = c.duration;
  j["angle_sigma_deg"] = c.angle_sigma_deg;
  j["systematic_quarter_deg"] = c.systematic_quarter_deg;
  j["systematic_half_deg"] = c.systematic_half_deg;
  j["methods"] = c.methods;
  j["kf_samples"] = c.kf_samples;
  j["ml_bootstrap"] = c.ml_bootstrap;
  j["key_basis"] = std::string(1, basis_letter(c.key_basis));
  j["epsilon"] = c.epsilon;
  j["sigma_margin"] = c.sigma_margin;
  if (c.seed) j["seed"] = *c.seed;
  j["output_dir"] = c.output_dir;
  return j.dump(2) + "\n";
}

DensityMatrix build_state(const StateSpec& spec) {
  const DensityMatrix base = named_state(spec.name);
  return spec.noise.is_identity() ? base : apply_noise(base, spec.noise);
}

}  // namespace shieldlab::cli
