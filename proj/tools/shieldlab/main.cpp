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

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "shieldlab/errors.hpp"

namespace {

using shieldlab::cli::RunConfig;

constexpr int kExitInvalidConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitReconciliation = 4;

// Flags shared by every subcommand; each overrides the config file.
struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_intervals;
  std::optional<std::string> output_dir;
  std::optional<std::string> state;
  std::optional<double> epsilon;
  std::optional<double> sigma_margin;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> bootstrap;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON run configuration");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--n-intervals", n_intervals, "acquisition intervals");
    app->add_option("-o,--output-dir", output_dir, "directory for output files");
    app->add_option("--state", state, "named source state");
    app->add_option("--epsilon", epsilon, "privacy-amplification failure probability");
    app->add_option("--sigma-margin", sigma_margin, "standard deviations added to chi_E");
    app->add_option("--samples", samples, "slice samples from the KF posterior");
    app->add_option("--bootstrap", bootstrap, "ML bootstrap replicas");
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : shieldlab::cli::load_config(config_path);
    if (seed) c.seed = *seed;
    if (n_intervals) c.n_intervals = *n_intervals;
    if (output_dir) c.output_dir = *output_dir;
    if (state) c.state.name = *state;
    if (epsilon) c.epsilon = *epsilon;
    if (sigma_margin) c.sigma_margin = *sigma_margin;
    if (samples) c.kf_samples = *samples;
    if (bootstrap) c.ml_bootstrap = *bootstrap;
    c.validate();
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shieldlab: private-state key and entanglement laboratory"};
  app.require_subcommand(1);

  Overrides sim_o, rec_o, smp_o, rep_o, key_o, dis_o, rep2_o;
  std::string records, posterior, events, ensemble, method = "both", key_method = "direct", reference = "gamma-lab";
  std::vector<std::string> ensembles;

  auto* simulate = app.add_subcommand("simulate", "simulate count records and the event stream");
  sim_o.attach(simulate);

  auto* reconstruct = app.add_subcommand("reconstruct", "ML and/or KF tomography of count records");
  rec_o.attach(reconstruct);
  reconstruct->add_option("records", records, "count-record file")->required();
  reconstruct->add_option("--method", method, "ml, kf or both")->check(CLI::IsMember({"ml", "kf", "both"}));

  auto* sample = app.add_subcommand("sample", "slice-sample a stored KF posterior");
  smp_o.attach(sample);
  sample->add_option("posterior", posterior, "posterior file")->required();

  auto* report = app.add_subcommand("report", "key rate, log-negativity and distillation report");
  rep_o.attach(report);
  report->add_option("ensembles", ensembles, "ensemble files, or state:NAME for a single state")->required();
  report->add_option("--reference", reference, "named state for the fidelity column");

  auto* keygen = app.add_subcommand("keygen", "sift, reconcile and amplify a key");
  key_o.attach(keygen);
  keygen->add_option("events", events, "event-stream file")->required();
  keygen->add_option("ensemble", ensemble, "ensemble for the chi_E bound")->required();
  keygen->add_option("--method", key_method, "direct or distilled")->check(CLI::IsMember({"direct", "distilled"}));

  auto* distill = app.add_subcommand("distill", "shield-measurement distillation table");
  dis_o.attach(distill);
  distill->add_option("ensemble", ensemble, "ensemble file or state:NAME")->required();

  auto* repro = app.add_subcommand("repro", "full reproduction pipeline with default settings");
  rep2_o.attach(repro);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidConfig;
  }

  try {
    if (simulate->parsed()) {
      shieldlab::cli::cmd_simulate(sim_o.resolve(), std::cout);
    } else if (reconstruct->parsed()) {
      RunConfig c = rec_o.resolve();
      if (method != "both") c.methods = {method};
      shieldlab::cli::cmd_reconstruct(c, records, std::cout);
    } else if (sample->parsed()) {
      shieldlab::cli::cmd_sample(smp_o.resolve(), posterior, std::cout);
    } else if (report->parsed()) {
      shieldlab::cli::cmd_report(rep_o.resolve(), ensembles, reference, std::cout);
    } else if (keygen->parsed()) {
      shieldlab::cli::cmd_keygen(key_o.resolve(), events, ensemble, key_method, std::cout);
    } else if (distill->parsed()) {
      shieldlab::cli::cmd_distill(dis_o.resolve(), ensemble, std::cout);
    } else if (repro->parsed()) {
      shieldlab::cli::cmd_repro(rep2_o.resolve(), std::cout);
    }
  } catch (const shieldlab::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const shieldlab::ReconciliationFailure& e) {
    std::cerr << "error correction failed: " << e.what() << '\n';
    return kExitReconciliation;
  } catch (const shieldlab::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
