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

#include "commands.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "shieldlab/errors.hpp"
#include "shieldlab/expsim.hpp"
#include "shieldlab/formats.hpp"
#include "shieldlab/keypipe.hpp"
#include "shieldlab/privacy.hpp"
#include "shieldlab/seeding.hpp"
#include "shieldlab/tomography.hpp"

namespace shieldlab::cli {
namespace {

namespace fs = std::filesystem;

std::string output_path(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.output_dir);
  return (fs::path(c.output_dir) / name).string();
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  body(f);
  if (!f) throw InvalidArgument("write to '" + path + "' failed");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot read '" + path + "'");
  return f;
}

template <typename T>
T read_file(const std::string& path, T (*reader)(std::istream&)) {
  auto f = open_input(path);
  return reader(f);
}

std::string seconds(double s) { return format_double(s, 4) + "s"; }

SimulationParams simulation_params(const RunConfig& c) {
  SimulationParams p;
  p.rate = c.rate;
  p.duration = c.duration;
  p.angle_sigma = degrees(c.angle_sigma_deg);
  p.seed = derive_seed(c.master_seed(), "simulate");
  for (auto& a : p.systematic) a = WaveplateAngles{degrees(c.systematic_quarter_deg), degrees(c.systematic_half_deg)};
  return p;
}

KeygenOptions keygen_options(const RunConfig& c) {
  KeygenOptions o;
  o.key_basis = c.key_basis;
  o.epsilon = c.epsilon;
  o.sigma_margin = c.sigma_margin;
  o.seed = derive_seed(c.master_seed(), "keygen");
  return o;
}

StateEnsemble load_ensemble(const std::string& spec) {
  if (spec.starts_with("state:")) {
    StateEnsemble e;
    e.members.push_back(named_state(spec.substr(6)));
    return e;
  }
  return read_file(spec, &read_ensemble);
}

// identical p, identical rate, opposite rate, average rate
using DistillRow = std::array<double, 4>;

std::vector<DistillRow> distill_rows(const StateEnsemble& ens, Basis shield, Basis key_basis) {
  std::vector<DistillRow> rows(ens.size());
  parallel_for(ens.size(), [&](std::size_t i) {
    const DistillationTable t = distillation_analysis(ens.members[i], shield, key_basis);
    rows[i] = {t.identical.probability, t.identical.x_cqq, t.opposite.x_cqq, t.average_rate};
  });
  return rows;
}

FunctionalStats column_stats(const std::vector<DistillRow>& rows, std::size_t col) {
  FunctionalStats s;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) s.mean += r[col] / n;
  if (rows.size() > 1) {
    for (const auto& r : rows) s.stddev += (r[col] - s.mean) * (r[col] - s.mean);
    s.stddev = std::sqrt(s.stddev / (n - 1.0));
  }
  return s;
}

constexpr const char* kDistillColumns[] = {"p_identical", "identical_rate", "opposite_rate", "average_rate"};

// "name mean std value(uncertainty)"
void quantity_line(std::ostream& out, const std::string& name, const FunctionalStats& s) {
  out << name << ' ' << format_double(s.mean) << ' ' << format_double(s.stddev) << ' '
      << format_uncertainty(s.mean, s.stddev) << '\n';
}

void ensemble_report(std::ostream& out, const std::string& title, const StateEnsemble& ens, Basis key_basis,
                     const DensityMatrix& reference) {
  std::vector<KeyRateReport> reports(ens.size());
  parallel_for(ens.size(), [&](std::size_t i) { reports[i] = key_rate_cqq(ens.members[i], key_basis); });
  auto stats = [&](const std::function<double(std::size_t)>& f) {
    FunctionalStats s;
    const double n = static_cast<double>(ens.size());
    for (std::size_t i = 0; i < ens.size(); ++i) s.mean += f(i) / n;
    if (ens.size() > 1) {
      for (std::size_t i = 0; i < ens.size(); ++i) s.stddev += (f(i) - s.mean) * (f(i) - s.mean);
      s.stddev = std::sqrt(s.stddev / (n - 1.0));
    }
    return s;
  };
  const FunctionalStats chi_b = stats([&](std::size_t i) { return reports[i].chi_B; });
  const FunctionalStats chi_e = stats([&](std::size_t i) { return reports[i].chi_E; });
  const FunctionalStats x = stats([&](std::size_t i) { return reports[i].x_cqq; });
  const FunctionalStats l = stats([&](std::size_t i) { return reports[i].log_negativity; });
  const FunctionalStats sep = stats([&](std::size_t i) { return reports[i].separation; });
  const FunctionalStats f = functional_stats(ens, [&](const DensityMatrix& m) { return fidelity(m, reference); });

  out << "# report " << title << " members=" << ens.size() << " key_basis=" << basis_letter(key_basis) << '\n';
  quantity_line(out, "chi_B", chi_b);
  quantity_line(out, "chi_E", chi_e);
  quantity_line(out, "x_cqq", x);
  quantity_line(out, "log_negativity", l);
  quantity_line(out, "separation", sep);
  quantity_line(out, "fidelity", f);
  if (sep.stddev > 0.0) {
    out << "significance " << format_double(sep.mean / sep.stddev, 4) << '\n';
  } else {
    out << "significance " << (sep.mean > 0.0 ? "inf" : "0") << '\n';
  }
  for (Basis shield : kAllBases) {
    const auto rows = distill_rows(ens, shield, key_basis);
    for (std::size_t col = 0; col < 4; ++col) {
      quantity_line(out, std::string("distill_") + basis_letter(shield) + "_" + kDistillColumns[col],
                    column_stats(rows, col));
    }
  }
}

void transcript_summary(std::ostream& out, const KeyTranscript& t) {
  out << "method " << (t.method == KeyMethod::Direct ? "direct" : "distilled") << '\n'
      << "raw_length " << t.raw_length() << '\n'
      << "compatible_intervals " << t.compatible_intervals << '\n'
      << "qber_estimate " << format_double(t.qber_estimate) << '\n'
      << "ec_leak " << t.ec_leak << '\n'
      << "leak " << t.leak << '\n'
      << "corrections " << t.corrections << '\n'
      << "chi_E_bound " << format_double(t.chi_E_bound) << '\n'
      << "final_length " << t.final_key.size() << '\n';
}

KeyTranscript run_keygen(const RunConfig& c, const std::vector<EventRecord>& events, const StateEnsemble& ens,
                         const std::string& method, std::ostream& out) {
  KeyTranscript t;
  if (method == "direct") {
    t = direct_keygen(events, ens, keygen_options(c));
  } else if (method == "distilled") {
    t = distilled_keygen(events, ens, keygen_options(c));
  } else {
    throw InvalidArgument("unknown keygen method '" + method + "'");
  }
  if (t.corrected != t.alice_key) throw ReconciliationFailure("keys differ after error correction");
  write_file(output_path(c, "transcript_" + method + ".txt"), [&](std::ostream& f) { write_transcript(f, t); });
  transcript_summary(out, t);
  return t;
}

struct Reconstruction {
  std::optional<MlResult> ml;
  std::optional<StateEnsemble> ml_ensemble;
  std::optional<PosteriorSummary> posterior;
  std::optional<StateEnsemble> kf_ensemble;
};

StateEnsemble sample_posterior(const RunConfig& c, const PosteriorSummary& post, std::ostream& out) {
  SliceOptions so;
  so.n_samples = c.kf_samples;
  so.seed = derive_seed(c.master_seed(), "sample");
  SliceDiagnostics d;
  StateEnsemble e = slice_sample(post, so, &d);
  out << "kf_samples " << e.size() << " lag " << d.lag << '\n';
  return e;
}

Reconstruction reconstruct(const RunConfig& c, const std::vector<CountRecord>& records, std::ostream& out) {
  Reconstruction r;
  if (c.uses("ml")) {
    r.ml = ml_reconstruct(records);
    write_file(output_path(c, "ml_estimate.txt"), [&](std::ostream& f) { write_operator(f, r.ml->estimate.op()); });
    out << "ml_iterations " << r.ml->iterations << (r.ml->converged ? "" : " (not converged)") << '\n';
    out << "ml_log_likelihood " << format_double(r.ml->log_likelihood) << '\n';
    if (c.ml_bootstrap > 0) {
      BootstrapOptions b;
      b.n_boot = c.ml_bootstrap;
      b.angle_sigma = degrees(c.angle_sigma_deg);
      b.seed = derive_seed(c.master_seed(), "bootstrap");
      r.ml_ensemble = ml_bootstrap(records, b);
      write_file(output_path(c, "ml_ensemble.txt"), [&](std::ostream& f) { write_ensemble(f, *r.ml_ensemble); });
      out << "ml_bootstrap " << r.ml_ensemble->size() << '\n';
    }
  }
  if (c.uses("kf")) {
    r.posterior = kf_posterior(records);
    r.kf_ensemble = sample_posterior(c, *r.posterior, out);
    r.posterior = with_constrained_mean(*r.posterior, *r.kf_ensemble);
    write_file(output_path(c, "posterior.txt"), [&](std::ostream& f) { write_posterior(f, *r.posterior); });
    write_file(output_path(c, "kf_ensemble.txt"), [&](std::ostream& f) { write_ensemble(f, *r.kf_ensemble); });
    const BlochVector constrained = to_bloch(r.posterior->constrained_mean->op());
    const double threshold = mahalanobis_threshold(constrained.coefficients().size());
    const double diag = mahalanobis(r.posterior->mean, constrained, r.posterior->covariance);
    out << "mahalanobis_threshold " << format_double(threshold) << '\n';
    out << "mahalanobis_unconstrained_vs_constrained " << format_double(diag)
        << (diag > threshold ? " (exceeds threshold: systematic error suspected)" : "") << '\n';
    if (r.ml) {
      const double d = mahalanobis(to_bloch(r.ml->estimate.op()), constrained, r.posterior->covariance);
      out << "mahalanobis_ml_vs_kf " << format_double(d) << (d > threshold ? " (exceeds threshold)" : "") << '\n';
    }
  }
  return r;
}

}  // namespace

void cmd_simulate(const RunConfig& c, std::ostream& out) {
  const DensityMatrix rho = build_state(c.state);
  const auto schedule = schedule_settings(c.n_intervals, derive_seed(c.master_seed(), "schedule"));
  const auto records = simulate_counts(rho, schedule, simulation_params(c));
  const auto events = expand_events(records, derive_seed(c.master_seed(), "events"));
  write_file(output_path(c, "records.txt"), [&](std::ostream& f) { write_count_records(f, records); });
  write_file(output_path(c, "events.txt"), [&](std::ostream& f) { write_events(f, events); });
  write_file(output_path(c, "config.json"), [&](std::ostream& f) { f << to_json(c); });
  std::int64_t fourfolds = 0;
  for (const auto& r : records) fourfolds += r.total();
  out << "records " << records.size() << '\n' << "fourfolds " << fourfolds << '\n';
}

void cmd_reconstruct(const RunConfig& c, const std::string& records_path, std::ostream& out) {
  reconstruct(c, read_file(records_path, &read_count_records), out);
}

void cmd_sample(const RunConfig& c, const std::string& posterior_path, std::ostream& out) {
  const PosteriorSummary post = read_file(posterior_path, &read_posterior);
  const StateEnsemble e = sample_posterior(c, post, out);
  write_file(output_path(c, "kf_ensemble.txt"), [&](std::ostream& f) { write_ensemble(f, e); });
}

void cmd_report(const RunConfig& c, const std::vector<std::string>& ensemble_paths, const std::string& reference,
                std::ostream& out) {
  if (ensemble_paths.empty()) throw InvalidArgument("report needs at least one ensemble");
  const DensityMatrix ref = named_state(reference);
  std::ostringstream text;
  for (const auto& p : ensemble_paths) ensemble_report(text, p, load_ensemble(p), c.key_basis, ref);
  write_file(output_path(c, "report.txt"), [&](std::ostream& f) { f << text.str(); });
  out << text.str();
}

void cmd_keygen(const RunConfig& c, const std::string& events_path, const std::string& ensemble_path,
                const std::string& method, std::ostream& out) {
  run_keygen(c, read_file(events_path, &read_events), load_ensemble(ensemble_path), method, out);
}

void cmd_distill(const RunConfig& c, const std::string& ensemble_path, std::ostream& out) {
  const StateEnsemble ens = load_ensemble(ensemble_path);
  out << "# distillation key_basis=" << basis_letter(c.key_basis) << " members=" << ens.size() << '\n';
  for (Basis shield : kAllBases) {
    const auto rows = distill_rows(ens, shield, c.key_basis);
    for (std::size_t col = 0; col < 4; ++col) {
      quantity_line(out, std::string("shield_") + basis_letter(shield) + "_" + kDistillColumns[col],
                    column_stats(rows, col));
    }
  }
}

void cmd_repro(const RunConfig& c, std::ostream& out) {
  out << "== simulate\n";
  cmd_simulate(c, out);
  const auto records = read_file(output_path(c, "records.txt"), &read_count_records);
  const auto events = read_file(output_path(c, "events.txt"), &read_events);

  out << "== reconstruct\n";
  const Reconstruction r = reconstruct(c, records, out);

  out << "== report\n";
  const DensityMatrix ref = named_state("gamma-lab");
  std::ostringstream text;
  if (r.kf_ensemble) ensemble_report(text, "kf", *r.kf_ensemble, c.key_basis, ref);
  if (r.ml_ensemble) ensemble_report(text, "ml-bootstrap", *r.ml_ensemble, c.key_basis, ref);
  if (r.ml) {
    StateEnsemble point;
    point.members.push_back(r.ml->estimate);
    ensemble_report(text, "ml-point", point, c.key_basis, ref);
  }
  write_file(output_path(c, "report.txt"), [&](std::ostream& f) { f << text.str(); });
  out << text.str();

  if (!r.kf_ensemble && !r.ml_ensemble) {
    throw InvalidArgument("repro needs kf sampling or ml_bootstrap > 0 for the key bound");
  }
  const StateEnsemble& keys = r.kf_ensemble ? *r.kf_ensemble : *r.ml_ensemble;
  out << "== keygen direct\n";
  const KeyTranscript direct = run_keygen(c, events, keys, "direct", out);
  out << "== keygen distilled\n";
  const KeyTranscript distilled = run_keygen(c, events, keys, "distilled", out);
  out << "== summary\n";
  out << "direct_final " << direct.final_key.size() << " distilled_final " << distilled.final_key.size()
      << (distilled.final_key.size() < direct.final_key.size() ? " (distilled shorter)" : " (distilled NOT shorter)")
      << '\n';
}

}  // namespace shieldlab::cli
