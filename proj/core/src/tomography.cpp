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

#include "shieldlab/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "shieldlab/errors.hpp"
#include "shieldlab/seeding.hpp"

namespace shieldlab {

double SettingGroup::total() const {
  double t = 0.0;
  for (double c : counts) t += c;
  return t;
}

std::vector<SettingGroup> group_by_setting(const std::vector<CountRecord>& records) {
  std::map<int, SettingGroup> by_code;
  for (const auto& rec : records) {
    const int code = rec.setting.code();
    auto [it, inserted] = by_code.try_emplace(code);
    SettingGroup& g = it->second;
    if (inserted) {
      g.setting = MeasurementSetting::from_code(code);
      g.kets = povm_kets(g.setting);
    }
    for (std::size_t k = 0; k < kNumOutcomes; ++k) g.counts[k] += static_cast<double>(rec.counts[k]);
  }
  std::vector<SettingGroup> out;
  out.reserve(by_code.size());
  for (auto& [code, g] : by_code) {
    if (g.total() > 0.0) out.push_back(std::move(g));
  }
  return out;
}

void require_informational_completeness(const std::vector<SettingGroup>& groups) {
  const Eigen::Index dim = bloch_dimension(kNumAnalyzers);
  RealMatrix rows(static_cast<Eigen::Index>(groups.size() * kNumOutcomes), dim);
  Eigen::Index r = 0;
  for (const auto& g : groups) {
    for (const auto& v : g.kets) {
      rows.row(r++) = to_bloch(QOperator::projector(kSystemLabels, v)).coefficients().transpose();
    }
  }
  if (rows.rows() < dim) throw NumericalError("tomography data is not informationally complete");
  Eigen::ColPivHouseholderQR<RealMatrix> qr(rows);
  qr.setThreshold(1e-9);
  if (qr.rank() < dim) throw NumericalError("tomography data is not informationally complete");
}

// ---------------------------------------------------------------------------
// Maximum likelihood

namespace {

// Projectors as columns of a 16 x m matrix, with the matching frequencies.
struct LikelihoodData {
  Matrix kets;
  RealVector freq;
};

LikelihoodData flatten(const std::vector<SettingGroup>& groups) {
  double total = 0.0;
  Eigen::Index m = 0;
  for (const auto& g : groups) {
    for (double c : g.counts) {
      if (c > 0.0) ++m;
      total += c;
    }
  }
  if (total <= 0.0) throw NumericalError("tomography data contains no counts");
  LikelihoodData data{Matrix(16, m), RealVector(m)};
  Eigen::Index col = 0;
  for (const auto& g : groups) {
    for (std::size_t k = 0; k < kNumOutcomes; ++k) {
      if (g.counts[k] <= 0.0) continue;
      data.kets.col(col) = g.kets[k];
      data.freq(col) = g.counts[k] / total;
      ++col;
    }
  }
  return data;
}

RealVector probabilities(const Matrix& rho, const Matrix& kets) {
  const Matrix rk = rho * kets;
  return (kets.conjugate().cwiseProduct(rk)).colwise().sum().real().transpose().cwiseMax(1e-300);
}

double loglik(const RealVector& p, const RealVector& f) { return (f.array() * p.array().log()).sum(); }

Matrix r_operator(const Matrix& kets, const RealVector& f, const RealVector& p) {
  const RealVector w = f.cwiseQuotient(p);
  return kets * w.asDiagonal() * kets.adjoint();
}

Matrix normalized(Matrix m) {
  m = 0.5 * (m + m.adjoint());
  m /= m.trace().real();
  return m;
}

}  // namespace

double log_likelihood(const DensityMatrix& rho, const std::vector<SettingGroup>& groups) {
  const LikelihoodData data = flatten(groups);
  return loglik(probabilities(rho.matrix(), data.kets), data.freq);
}

Matrix ml_r_operator(const DensityMatrix& rho, const std::vector<SettingGroup>& groups) {
  const LikelihoodData data = flatten(groups);
  return r_operator(data.kets, data.freq, probabilities(rho.matrix(), data.kets));
}

MlResult ml_reconstruct_groups(const std::vector<SettingGroup>& groups, const MlOptions& options) {
  require_informational_completeness(groups);
  const LikelihoodData data = flatten(groups);
  const Eigen::Index d = data.kets.rows();
  const Matrix id = Matrix::Identity(d, d);

  Matrix rho = options.initial ? options.initial->matrix() : Matrix(id / static_cast<double>(d));
  RealVector p = probabilities(rho, data.kets);
  double ll = loglik(p, data.freq);

  MlResult result{DensityMatrix::maximally_mixed(kSystemLabels), ll, 0, false, {}};
  for (int it = 0; it < options.max_iterations; ++it) {
    const Matrix r = r_operator(data.kets, data.freq, p);
    Matrix next = normalized(r * rho * r);
    RealVector p_next = probabilities(next, data.kets);
    double ll_next = loglik(p_next, data.freq);
    if (ll_next < ll) {
      // diluted step (I + eps R) rho (I + eps R), halving eps until the likelihood rises
      for (double eps = options.dilution; eps > 1e-14; eps *= 0.5) {
        const Matrix step = id + eps * r;
        next = normalized(step * rho * step);
        p_next = probabilities(next, data.kets);
        ll_next = loglik(p_next, data.freq);
        if (ll_next >= ll) break;
      }
    }
    result.iterations = it + 1;
    if (ll_next < ll) {
      // no ascent direction left
      result.converged = true;
      break;
    }
    const double gain = ll_next - ll;
    rho = std::move(next);
    p = std::move(p_next);
    ll = ll_next;
    if (options.record_history) result.history.push_back(ll);
    if (gain < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.estimate = DensityMatrix::from_numeric(QOperator(kSystemLabels, rho));
  result.log_likelihood = ll;
  return result;
}

MlResult ml_reconstruct(const std::vector<CountRecord>& records, const MlOptions& options) {
  return ml_reconstruct_groups(group_by_setting(records), options);
}

StateEnsemble ml_bootstrap(const std::vector<CountRecord>& records, const BootstrapOptions& options) {
  const std::vector<SettingGroup> groups = group_by_setting(records);
  const MlResult plain = ml_reconstruct_groups(groups, options.ml);
  const Eigen::Index d = plain.estimate.dim();
  const DensityMatrix start = DensityMatrix::from_numeric(QOperator(
      kSystemLabels, 0.9 * plain.estimate.matrix() + 0.1 * Matrix::Identity(d, d) / static_cast<double>(d)));

  StateEnsemble ensemble;
  ensemble.provenance = EnsembleProvenance::MlBootstrap;
  ensemble.seed = options.seed;
  std::vector<std::optional<DensityMatrix>> slots(options.n_boot);
  parallel_for(options.n_boot, [&](std::size_t r) {
    Rng rng = make_rng(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
    std::normal_distribution<double> jitter(0.0, options.angle_sigma);
    std::vector<SettingGroup> replica = groups;
    for (auto& g : replica) {
      if (options.resample_counts) {
        for (auto& c : g.counts) {
          if (c > 0.0) {
            std::poisson_distribution<std::int64_t> draw(c);
            c = static_cast<double>(draw(rng));
          }
        }
      }
      if (options.angle_sigma > 0.0) {
        for (auto& w : g.setting.perturbation) {
          w.quarter = jitter(rng);
          w.half = jitter(rng);
        }
        g.kets = povm_kets(g.setting);
      }
    }
    MlOptions ml = options.ml;
    ml.initial = start;
    ml.record_history = false;
    slots[r] = ml_reconstruct_groups(replica, ml).estimate;
  });
  ensemble.members.reserve(options.n_boot);
  for (auto& s : slots) ensemble.members.push_back(std::move(*s));
  return ensemble;
}

// ---------------------------------------------------------------------------
// Gaussian posterior

KalmanTomography::KalmanTomography(double prior_sigma)
    : mean_(RealVector::Zero(bloch_dimension(kNumAnalyzers))),
      covariance_(RealMatrix::Identity(bloch_dimension(kNumAnalyzers), bloch_dimension(kNumAnalyzers)) *
                  (prior_sigma * prior_sigma)) {
  if (!(prior_sigma > 0.0)) throw InvalidArgument("prior sigma must be positive");
}

void KalmanTomography::update(const SettingGroup& group) {
  const double n_total = group.total();
  if (n_total <= 0.0) return;
  const double d = static_cast<double>(kNumOutcomes);
  for (std::size_t k = 0; k < kNumOutcomes; ++k) {
    const QOperator proj = QOperator::projector(kSystemLabels, group.kets[k]);
    const RealVector h = n_total * to_bloch(proj).coefficients();
    const double offset = n_total * proj.trace().real() / d;
    const double variance = std::max(group.counts[k], 1.0);

    const RealVector ph = covariance_ * h;
    const double innovation_var = h.dot(ph) + variance;
    if (!(innovation_var > 0.0) || !std::isfinite(innovation_var)) {
      throw NumericalError("Kalman update: singular innovation variance");
    }
    const double residual = group.counts[k] - offset - h.dot(mean_);
    mean_ += ph * (residual / innovation_var);
    covariance_.noalias() -= (ph / innovation_var) * ph.transpose();
    ++observations_;
  }
  covariance_ = 0.5 * (covariance_ + covariance_.transpose()).eval();
}

void KalmanTomography::update(const std::vector<SettingGroup>& groups) {
  for (const auto& g : groups) update(g);
}

PosteriorSummary kf_posterior(const std::vector<CountRecord>& records, double prior_sigma) {
  KalmanTomography kf(prior_sigma);
  kf.update(group_by_setting(records));
  return {BlochVector(kNumAnalyzers, kf.mean()), kf.covariance(), std::nullopt, records.size()};
}

PosteriorSummary with_constrained_mean(PosteriorSummary posterior, const StateEnsemble& ensemble) {
  posterior.constrained_mean = ensemble_mean(ensemble);
  return posterior;
}

double mahalanobis(const BlochVector& a, const BlochVector& b, const RealMatrix& covariance) {
  if (a.size() != b.size() || covariance.rows() != a.size() || covariance.cols() != a.size()) {
    throw InvalidArgument("mahalanobis: dimension mismatch");
  }
  const RealVector diff = a.coefficients() - b.coefficients();
  Eigen::LLT<RealMatrix> llt(covariance);
  if (llt.info() != Eigen::Success) {
    llt.compute(covariance + 1e-12 * RealMatrix::Identity(covariance.rows(), covariance.cols()));
    if (llt.info() != Eigen::Success) throw NumericalError("mahalanobis: covariance is not positive definite");
  }
  return llt.matrixL().solve(diff).norm();
}

double mahalanobis_threshold(std::size_t dof, double confidence) {
  boost::math::chi_squared dist(static_cast<double>(dof));
  return std::sqrt(boost::math::quantile(dist, confidence));
}

FunctionalStats functional_stats(const StateEnsemble& ensemble,
                                 const std::function<double(const DensityMatrix&)>& f) {
  if (ensemble.members.empty()) throw InvalidArgument("functional_stats: empty ensemble");
  std::vector<double> values(ensemble.size());
  parallel_for(ensemble.size(), [&](std::size_t i) { values[i] = f(ensemble.members[i]); });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  return {mean, sd};
}

DensityMatrix ensemble_mean(const StateEnsemble& ensemble) {
  if (ensemble.members.empty()) throw InvalidArgument("ensemble_mean: empty ensemble");
  Matrix acc = Matrix::Zero(ensemble.members.front().dim(), ensemble.members.front().dim());
  for (const auto& m : ensemble.members) acc += m.matrix();
  acc /= static_cast<double>(ensemble.size());
  return DensityMatrix::from_numeric(QOperator(ensemble.members.front().labels(), std::move(acc)));
}

}  // namespace shieldlab
