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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "shieldlab/errors.hpp"
#include "shieldlab/seeding.hpp"
#include "shieldlab/tomography.hpp"

namespace shieldlab {
namespace {

// Posterior in whitened coordinates: theta = mean + L z, z ~ Normal(0, I)
// restricted to { z : from_bloch(theta) >= -kPsdTol }.
struct WhitenedPosterior {
  std::size_t num_qubits = 0;
  Matrix center;               // from_bloch(mean)
  std::vector<Matrix> directions;  // traceless image of each column of L
  RealMatrix chol;             // L
  RealVector mean;
};

WhitenedPosterior whiten(const PosteriorSummary& posterior) {
  WhitenedPosterior w;
  w.num_qubits = posterior.mean.num_qubits();
  w.mean = posterior.mean.coefficients();
  const Eigen::Index n = w.mean.size();
  Eigen::LLT<RealMatrix> llt(posterior.covariance);
  if (llt.info() != Eigen::Success) {
    llt.compute(posterior.covariance + 1e-12 * RealMatrix::Identity(n, n));
    if (llt.info() != Eigen::Success) throw NumericalError("slice_sample: covariance is not positive definite");
  }
  w.chol = llt.matrixL();
  const Eigen::Index d = Eigen::Index{1} << w.num_qubits;
  w.center = traceless_from_coefficients(w.mean, w.num_qubits);
  w.center.diagonal().array() += 1.0 / static_cast<double>(d);
  w.directions.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    w.directions.push_back(traceless_from_coefficients(w.chol.col(i), w.num_qubits));
  }
  return w;
}

class FeasibilityTest {
 public:
  explicit FeasibilityTest(Eigen::Index d) : shifted_(d, d), llt_(d) {}

  bool operator()(const Matrix& rho) {
    ++checks;
    shifted_ = rho;
    shifted_.diagonal().array() += kPsdTol;
    llt_.compute(shifted_);
    return llt_.info() == Eigen::Success;
  }

  std::size_t checks = 0;

 private:
  Matrix shifted_;
  Eigen::LLT<Matrix> llt_;
};

class Chain {
 public:
  Chain(const WhitenedPosterior& post, const SliceOptions& options, std::uint64_t seed)
      : post_(post),
        options_(options),
        rng_(make_rng(seed)),
        feasible_(post.center.rows()),
        z_(RealVector::Zero(post.mean.size())),
        candidate_(post.center.rows(), post.center.rows()) {
    rho_ = post_.center;
    if (!feasible_(rho_)) start_inside();
  }

  void sweep() {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Eigen::Index n = z_.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x0 = z_(i);
      // slice of the standard normal: |x| < sqrt(x0^2 - 2 log u)
      const double u = 1.0 - unif(rng_);
      const double half = std::sqrt(x0 * x0 - 2.0 * std::log(u));
      double lo = -half, hi = half;
      const Matrix& dir = post_.directions[static_cast<std::size_t>(i)];
      std::size_t steps = 0;
      while (true) {
        const double x = lo + (hi - lo) * unif(rng_);
        candidate_ = rho_ + (x - x0) * dir;
        if (feasible_(candidate_)) {
          z_(i) = x;
          rho_.swap(candidate_);
          break;
        }
        if (x < x0) {
          lo = x;
        } else {
          hi = x;
        }
        if (++steps > options_.max_shrink_steps) {
          throw NumericalError("slice_sample: no feasible point found on the slice");
        }
      }
    }
    // refresh to remove accumulated rounding
    refresh();
  }

  double first_coordinate() const { return post_.mean(0) + post_.chol(0, 0) * z_(0); }

  DensityMatrix state(const Labels& labels) const {
    return DensityMatrix::from_numeric(QOperator(labels, rho_));
  }

  std::size_t checks() const { return feasible_.checks; }

 private:
  void refresh() {
    Matrix fresh = post_.center;
    for (Eigen::Index i = 0; i < z_.size(); ++i) {
      if (z_(i) != 0.0) fresh += z_(i) * post_.directions[static_cast<std::size_t>(i)];
    }
    if (feasible_(fresh)) rho_ = std::move(fresh);
  }

  void start_inside() {
    // nearest physical state, pulled slightly toward I/d so the start is interior
    Labels named;
    for (std::size_t q = 0; q < post_.num_qubits; ++q) named.push_back("q" + std::to_string(q));
    const DensityMatrix projected = project_to_physical(QOperator(named, post_.center));
    const RealVector target = 0.999 * to_bloch(projected.op()).coefficients();
    z_ = post_.chol.triangularView<Eigen::Lower>().solve(target - post_.mean);
    refresh_unchecked();
    if (!feasible_(rho_)) throw NumericalError("slice_sample: could not find a feasible starting point");
  }

  void refresh_unchecked() {
    rho_ = post_.center;
    for (Eigen::Index i = 0; i < z_.size(); ++i) rho_ += z_(i) * post_.directions[static_cast<std::size_t>(i)];
  }

  const WhitenedPosterior& post_;
  const SliceOptions& options_;
  Rng rng_;
  FeasibilityTest feasible_;
  RealVector z_;
  Matrix rho_;
  Matrix candidate_;
};

double autocorrelation(const std::vector<double>& x, std::size_t lag) {
  const std::size_t n = x.size();
  if (lag >= n) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += (x[i] - mean) * (x[i] - mean);
  for (std::size_t i = 0; i + lag < n; ++i) cov += (x[i] - mean) * (x[i + lag] - mean);
  return var > 0.0 ? cov / var : 0.0;
}

}  // namespace

StateEnsemble slice_sample(const PosteriorSummary& posterior, const SliceOptions& options,
                           SliceDiagnostics* diagnostics) {
  if (options.n_samples == 0) throw InvalidArgument("slice_sample: need at least one sample");
  if (options.chains == 0) throw InvalidArgument("slice_sample: need at least one chain");
  const WhitenedPosterior post = whiten(posterior);
  const Labels labels = post.num_qubits == kSystemLabels.size() ? kSystemLabels : [&] {
    Labels l;
    for (std::size_t q = 0; q < post.num_qubits; ++q) l.push_back("q" + std::to_string(q));
    return l;
  }();

  const std::size_t chains = std::min(options.chains, options.n_samples);
  std::vector<std::vector<DensityMatrix>> per_chain(chains);
  std::vector<SliceDiagnostics> diag(chains);
  parallel_for(chains, [&](std::size_t c) {
    Chain chain(post, options, derive_seed(options.seed, static_cast<std::uint64_t>(c)));
    for (std::size_t s = 0; s < options.burn_in; ++s) chain.sweep();

    std::vector<double> trace;
    trace.reserve(options.pilot);
    for (std::size_t s = 0; s < options.pilot; ++s) {
      chain.sweep();
      trace.push_back(chain.first_coordinate());
    }
    std::size_t lag = 1;
    double acf = autocorrelation(trace, 1);
    while (std::abs(acf) >= options.acf_threshold && lag < options.max_lag) {
      ++lag;
      acf = autocorrelation(trace, lag);
    }
    diag[c].lag = lag;
    diag[c].lag_autocorrelation = acf;

    const std::size_t quota = options.n_samples / chains + (c < options.n_samples % chains ? 1 : 0);
    per_chain[c].reserve(quota);
    for (std::size_t s = 0; s < quota; ++s) {
      for (std::size_t t = 0; t < lag; ++t) chain.sweep();
      per_chain[c].push_back(chain.state(labels));
    }
    diag[c].feasibility_checks = chain.checks();
  });

  StateEnsemble ensemble;
  ensemble.provenance = EnsembleProvenance::KfSampled;
  ensemble.seed = options.seed;
  ensemble.members.reserve(options.n_samples);
  for (auto& v : per_chain) {
    for (auto& m : v) ensemble.members.push_back(std::move(m));
  }
  if (diagnostics) {
    *diagnostics = diag.front();
    for (const auto& d : diag) {
      diagnostics->lag = std::max(diagnostics->lag, d.lag);
    }
    diagnostics->feasibility_checks = 0;
    for (const auto& d : diag) diagnostics->feasibility_checks += d.feasibility_checks;
  }
  return ensemble;
}

}  // namespace shieldlab
