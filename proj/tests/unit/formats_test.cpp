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

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "shieldlab/errors.hpp"
#include "shieldlab/formats.hpp"
#include "shieldlab/states.hpp"

namespace shieldlab {
namespace {

TEST(Numbers, SignificantDigitsAndUncertainty) {
  EXPECT_EQ(format_double(0.1234567890123456), "0.123456789012");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_uncertainty(0.6903, 0.0071), "0.690(7)");
  EXPECT_EQ(format_uncertainty(0.581, 0.004), "0.581(4)");
  EXPECT_EQ(format_uncertainty(0.3542, 0.0096), "0.35(1)");
  EXPECT_EQ(format_uncertainty(1.0, 0.0), "1");
}

TEST(CountRecords, RoundTrip) {
  SimulationParams p;
  p.seed = 1;
  const auto records = simulate_counts(calibrated_lab_state(), schedule_settings(200, 2), p);
  std::stringstream s;
  write_count_records(s, records);
  const auto back = read_count_records(s);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(back[i].index, records[i].index);
    EXPECT_EQ(back[i].setting.code(), records[i].setting.code());
    EXPECT_EQ(back[i].counts, records[i].counts);
    EXPECT_EQ(back[i].duration, records[i].duration);
  }
  EXPECT_THROW(parse_count_record("1 zzzz 10 1 2 3"), InvalidArgument);
  EXPECT_THROW(parse_count_record("1 zzqz 10 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0"), InvalidArgument);
  EXPECT_THROW(parse_count_record("1 zzzz 10 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 -1"), InvalidArgument);
}

TEST(Events, RoundTrip) {
  SimulationParams p;
  p.seed = 3;
  const auto events = expand_events(simulate_counts(ideal_lab_state(), schedule_settings(100, 4), p), 5);
  std::stringstream s;
  write_events(s, events);
  const auto back = read_events(s);
  ASSERT_EQ(back.size(), events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    EXPECT_EQ(back[i].index, events[i].index);
    EXPECT_EQ(back[i].setting.letters(), events[i].setting.letters());
    EXPECT_EQ(back[i].outcomes, events[i].outcomes);
  }
}

TEST(Operators, RoundTrip) {
  std::mt19937_64 rng(6);
  const QOperator op(kSystemLabels, oracle::random_operator(16, rng));
  std::stringstream s;
  write_operator(s, op);
  const QOperator back = read_operator(s);
  EXPECT_EQ(back.labels(), op.labels());
  EXPECT_LT(oracle::max_abs(back.matrix() - op.matrix()), 1e-11);
  std::stringstream bad("matrix A\n1 0\n");
  EXPECT_THROW(read_operator(bad), InvalidArgument);
}

TEST(Ensembles, RoundTrip) {
  std::mt19937_64 rng(7);
  StateEnsemble e;
  e.provenance = EnsembleProvenance::MlBootstrap;
  e.seed = 99;
  for (int i = 0; i < 4; ++i) e.members.emplace_back(QOperator(kSystemLabels, oracle::random_density(16, 16, rng)));
  std::stringstream s;
  write_ensemble(s, e);
  const StateEnsemble back = read_ensemble(s);
  EXPECT_EQ(back.provenance, e.provenance);
  EXPECT_EQ(back.seed, 99u);
  ASSERT_EQ(back.size(), 4u);
  EXPECT_EQ(back.members[0].labels(), kSystemLabels);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(oracle::max_abs(back.members[i].matrix() - e.members[i].matrix()), 1e-11);
  std::stringstream truncated("# shieldlab-ensemble provenance=kf seed=1 members=3 labels=A,B\n");
  EXPECT_THROW(read_ensemble(truncated), InvalidArgument);
}

TEST(Posteriors, RoundTrip) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  RealVector mean(15);
  RealMatrix m(15, 15);
  for (Eigen::Index i = 0; i < 15; ++i) {
    mean(i) = g(rng);
    for (Eigen::Index j = 0; j < 15; ++j) m(i, j) = g(rng);
  }
  const PosteriorSummary p{BlochVector(2, mean), m * m.transpose(), std::nullopt, 12};
  std::stringstream s;
  write_posterior(s, p);
  const PosteriorSummary back = read_posterior(s);
  EXPECT_EQ(back.n_records, 12u);
  EXPECT_EQ(back.mean.num_qubits(), 2u);
  EXPECT_LT((back.mean.coefficients() - mean).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((back.covariance - p.covariance).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(back.covariance, back.covariance.transpose());
}

TEST(Transcripts, ContainTheLogAndKeys) {
  std::mt19937_64 rng(9);
  SiftedKey sk;
  for (int i = 0; i < 400; ++i) {
    sk.alice.push_back(static_cast<std::uint8_t>(rng() & 1u));
    sk.bob.push_back(sk.alice.back() ^ static_cast<std::uint8_t>(i % 37 == 0));
  }
  KeygenOptions opt;
  opt.seed = 10;
  const KeyTranscript t = run_key_pipeline(sk, 0.1, opt);
  std::stringstream s;
  write_transcript(s, t);
  const std::string text = s.str();
  std::size_t msgs = 0, pos = 0;
  while ((pos = text.find("\nmsg ", pos)) != std::string::npos) {
    ++msgs;
    ++pos;
  }
  EXPECT_EQ(msgs, t.log.size());
  EXPECT_NE(text.find("final_key " + to_hex(t.final_key)), std::string::npos);
  EXPECT_NE(text.find("leak " + std::to_string(t.leak)), std::string::npos);
}

}  // namespace
}  // namespace shieldlab
