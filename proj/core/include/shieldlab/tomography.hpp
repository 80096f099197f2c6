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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "shieldlab/bloch.hpp"
#include "shieldlab/expsim.hpp"
#include "shieldlab/qlinalg.hpp"

namespace shieldlab {

/// Counts of all records sharing one nominal setting, with the projectors
/// the reconstruction assumes for them.
struct SettingGroup {
  MeasurementSetting setting;
  std::array<double, kNumOutcomes> counts{};
  std::array<Vector, kNumOutcomes> kets;

  double total() const;
};

/// Groups records by basis combination; projectors are the nominal ones
/// (perturbations recorded in the records are unknown to the analyst).
std::vector<SettingGroup> group_by_setting(const std::vector<CountRecord>& records);

/// Throws NumericalError unless the projectors of the groups span the full
/// operator space (rank 4^n - 1 after removing the identity direction).
void require_informational_completeness(const std::vector<SettingGroup>& groups);

// --- maximum likelihood -----------------------------------------------------

struct MlOptions {
  double tolerance = 1e-10;      // stop when the per-count log-likelihood gain drops below
  int max_iterations = 10000;
  double dilution = 0.1;         // first damped step when a full R rho R step loses likelihood
  bool record_history = false;
  std::optional<DensityMatrix> initial;
};

struct MlResult {
  DensityMatrix estimate;
  double log_likelihood = 0.0;   // sum_k f_k log p_k with f normalized to the total count
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;   // log-likelihood after each iteration, when requested
};

MlResult ml_reconstruct(const std::vector<CountRecord>& records, const MlOptions& options = {});
MlResult ml_reconstruct_groups(const std::vector<SettingGroup>& groups, const MlOptions& options = {});

/// Normalized log-likelihood of a state for grouped data.
double log_likelihood(const DensityMatrix& rho, const std::vector<SettingGroup>& groups);

/// The R operator sum_k (f_k / p_k) Pi_k at rho.
Matrix ml_r_operator(const DensityMatrix& rho, const std::vector<SettingGroup>& groups);

enum class EnsembleProvenance { KfSampled, MlBootstrap, Given };

struct StateEnsemble {
  std::vector<DensityMatrix> members;
  EnsembleProvenance provenance = EnsembleProvenance::Given;
  std::uint64_t seed = 0;

  std::size_t size() const { return members.size(); }
};

struct BootstrapOptions {
  std::size_t n_boot = 2000;
  double angle_sigma = degrees(0.25);
  bool resample_counts = true;    // Poisson redraw of every observed bin
  std::uint64_t seed = 0;
  MlOptions ml;
};

/// Each replica redraws counts ~ Poisson(observed) and plate errors ~
/// Normal(0, angle_sigma) per setting group and analyzer, then reruns ML
/// warm-started near the plain estimate.
StateEnsemble ml_bootstrap(const std::vector<CountRecord>& records, const BootstrapOptions& options);

// --- Kalman filter / Gaussian posterior ---------------------------------------

struct PosteriorSummary {
  BlochVector mean;                            // unconstrained Gaussian mean
  RealMatrix covariance;                       // (4^n - 1) x (4^n - 1)
  std::optional<DensityMatrix> constrained_mean;  // mean of physical samples
  std::size_t n_records = 0;
};

/// Sequential linear-Gaussian update in Bloch coordinates.
///
/// Each observation is one outcome bin of one setting: the count n_k is
/// modelled as N (1/d + h_k . theta) with h_k = to_bloch(Pi_k) and variance
/// max(n_k, 1). The prior is theta ~ Normal(0, prior_sigma^2 I).
class KalmanTomography {
 public:
  explicit KalmanTomography(double prior_sigma = 1.0);

  /// Folds in the 16 bins of one setting group.
  void update(const SettingGroup& group);
  void update(const std::vector<SettingGroup>& groups);

  const RealVector& mean() const { return mean_; }
  const RealMatrix& covariance() const { return covariance_; }
  std::size_t observations() const { return observations_; }

 private:
  RealVector mean_;
  RealMatrix covariance_;
  std::size_t observations_ = 0;
};

/// Groups the records by setting (the per-setting histogram is sufficient
/// under the nominal projectors) and runs the sequential filter.
PosteriorSummary kf_posterior(const std::vector<CountRecord>& records, double prior_sigma = 1.0);

struct SliceOptions {
  std::size_t n_samples = 10000;
  std::size_t burn_in = 1000;       // sweeps per chain
  std::size_t chains = 4;
  std::size_t pilot = 200;          // sweeps used to pick the thinning lag
  std::size_t max_lag = 50;
  double acf_threshold = 0.1;
  std::size_t max_shrink_steps = 1000000;
  std::uint64_t seed = 0;
};

struct SliceDiagnostics {
  std::size_t lag = 1;
  double lag_autocorrelation = 0.0;
  std::size_t feasibility_checks = 0;
};

/// Samples the posterior Gaussian truncated to the physical set by
/// coordinate-wise slice sampling in whitened coordinates.
StateEnsemble slice_sample(const PosteriorSummary& posterior, const SliceOptions& options,
                           SliceDiagnostics* diagnostics = nullptr);

/// Posterior with constrained_mean filled from an ensemble.
PosteriorSummary with_constrained_mean(PosteriorSummary posterior, const StateEnsemble& ensemble);

/// sqrt((a - b)^T cov^{-1} (a - b)); cov regularized by 1e-12 I if singular.
double mahalanobis(const BlochVector& a, const BlochVector& b, const RealMatrix& covariance);

/// sqrt of the chi-square quantile with `dof` degrees of freedom.
double mahalanobis_threshold(std::size_t dof, double confidence = 0.95);

struct FunctionalStats {
  double mean = 0.0;
  double stddev = 0.0;  // (n - 1)-normalized
};

FunctionalStats functional_stats(const StateEnsemble& ensemble,
                                 const std::function<double(const DensityMatrix&)>& f);

DensityMatrix ensemble_mean(const StateEnsemble& ensemble);

}  // namespace shieldlab
