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

#include "shieldlab/formats.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "shieldlab/bloch.hpp"
#include "shieldlab/errors.hpp"

namespace shieldlab {
namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

bool skip(const std::string& line) {
  const auto p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || line[p] == '#';
}

template <typename T>
T parse_number(const std::string& s, const char* what) {
  std::istringstream in(s);
  T v{};
  in >> v;
  if (in.fail() || !in.eof()) throw InvalidArgument(std::string("cannot parse ") + what + " from '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw InvalidArgument(std::string("cannot parse ") + what + " from '" + s + "'");
  return v;
}

std::map<std::string, std::string> header_fields(const std::string& line, const std::string& magic) {
  const auto t = tokens(line);
  if (t.size() < 2 || t[0] != "#" || t[1] != magic) throw InvalidArgument("expected a '" + magic + "' header");
  std::map<std::string, std::string> fields;
  for (std::size_t i = 2; i < t.size(); ++i) {
    const auto eq = t[i].find('=');
    if (eq == std::string::npos) throw InvalidArgument("malformed header field '" + t[i] + "'");
    fields[t[i].substr(0, eq)] = t[i].substr(eq + 1);
  }
  return fields;
}

const std::string& field(const std::map<std::string, std::string>& f, const std::string& key) {
  auto it = f.find(key);
  if (it == f.end()) throw InvalidArgument("header is missing '" + key + "'");
  return it->second;
}

Labels split_labels(const std::string& s) {
  Labels out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string join_labels(const Labels& labels) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) s += (i ? "," : "") + labels[i];
  return s;
}

const char* provenance_name(EnsembleProvenance p) {
  switch (p) {
    case EnsembleProvenance::KfSampled: return "kf";
    case EnsembleProvenance::MlBootstrap: return "ml-bootstrap";
    case EnsembleProvenance::Given: return "given";
  }
  return "given";
}

EnsembleProvenance provenance_from(const std::string& s) {
  if (s == "kf") return EnsembleProvenance::KfSampled;
  if (s == "ml-bootstrap") return EnsembleProvenance::MlBootstrap;
  if (s == "given") return EnsembleProvenance::Given;
  throw InvalidArgument("unknown ensemble provenance '" + s + "'");
}

const char* message_kind(MessageKind k) {
  switch (k) {
    case MessageKind::ParityRequest: return "parity?";
    case MessageKind::ParityReply: return "parity";
    case MessageKind::HashRequest: return "hash?";
    case MessageKind::HashReply: return "hash";
  }
  return "?";
}

}  // namespace

std::string format_double(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string format_uncertainty(double mean, double stddev) {
  if (!(stddev > 0.0) || !std::isfinite(stddev)) return format_double(mean);
  int exponent = static_cast<int>(std::floor(std::log10(stddev)));
  long digit = std::lround(stddev / std::pow(10.0, exponent));
  if (digit >= 10) {
    ++exponent;
    digit = std::lround(stddev / std::pow(10.0, exponent));
  }
  char buf[64];
  if (exponent < 0) {
    std::snprintf(buf, sizeof buf, "%.*f(%ld)", -exponent, mean, digit);
  } else {
    std::snprintf(buf, sizeof buf, "%.0f(%ld)", mean, digit * static_cast<long>(std::pow(10.0, exponent)));
  }
  return buf;
}

std::string format_count_record(const CountRecord& r) {
  std::ostringstream out;
  out << r.index << ' ' << r.setting.letters() << ' ' << format_double(r.duration);
  for (auto c : r.counts) out << ' ' << c;
  return out.str();
}

CountRecord parse_count_record(const std::string& line) {
  const auto t = tokens(line);
  if (t.size() != 3 + kNumOutcomes) throw InvalidArgument("count record needs 19 fields: '" + line + "'");
  CountRecord r;
  r.index = parse_number<std::size_t>(t[0], "interval index");
  r.setting = MeasurementSetting::from_letters(t[1]);
  r.duration = parse_double(t[2], "duration");
  if (!(r.duration >= 0.0)) throw InvalidArgument("count record has negative duration");
  for (std::size_t k = 0; k < kNumOutcomes; ++k) {
    r.counts[k] = parse_number<std::int64_t>(t[3 + k], "count");
    if (r.counts[k] < 0) throw InvalidArgument("count record has a negative count");
  }
  return r;
}

void write_count_records(std::ostream& out, const std::vector<CountRecord>& records) {
  out << "# index bases duration counts[16] (outcome 8a+4a'+2b+b', bit 0 = +1 port)\n";
  for (const auto& r : records) out << format_count_record(r) << '\n';
}

std::vector<CountRecord> read_count_records(std::istream& in) {
  std::vector<CountRecord> out;
  for (std::string line; std::getline(in, line);) {
    if (!skip(line)) out.push_back(parse_count_record(line));
  }
  return out;
}

void write_events(std::ostream& out, const std::vector<EventRecord>& events) {
  out << "# index bases n outcomes...\n";
  for (const auto& e : events) {
    out << e.index << ' ' << e.setting.letters() << ' ' << e.outcomes.size();
    for (auto o : e.outcomes) out << ' ' << static_cast<int>(o);
    out << '\n';
  }
}

std::vector<EventRecord> read_events(std::istream& in) {
  std::vector<EventRecord> out;
  for (std::string line; std::getline(in, line);) {
    if (skip(line)) continue;
    const auto t = tokens(line);
    if (t.size() < 3) throw InvalidArgument("event record too short: '" + line + "'");
    EventRecord e;
    e.index = parse_number<std::size_t>(t[0], "interval index");
    e.setting = MeasurementSetting::from_letters(t[1]);
    const auto n = parse_number<std::size_t>(t[2], "event count");
    if (t.size() != 3 + n) throw InvalidArgument("event record length mismatch: '" + line + "'");
    for (std::size_t i = 0; i < n; ++i) {
      const int o = parse_number<int>(t[3 + i], "outcome");
      if (o < 0 || o >= static_cast<int>(kNumOutcomes)) throw InvalidArgument("outcome out of range");
      e.outcomes.push_back(static_cast<std::uint8_t>(o));
    }
    out.push_back(std::move(e));
  }
  return out;
}

void write_operator(std::ostream& out, const QOperator& op) {
  out << "operator";
  for (const auto& l : op.labels()) out << ' ' << l;
  out << '\n';
  const Matrix& m = op.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? " " : "") << format_double(m(i, j).real()) << ' ' << format_double(m(i, j).imag());
    }
    out << '\n';
  }
}

QOperator read_operator(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && skip(line)) {
  }
  auto head = tokens(line);
  if (head.empty() || head[0] != "operator") throw InvalidArgument("expected an 'operator' line");
  Labels labels(head.begin() + 1, head.end());
  const Eigen::Index d = Eigen::Index{1} << labels.size();
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!std::getline(in, line)) throw InvalidArgument("operator truncated");
    const auto t = tokens(line);
    if (static_cast<Eigen::Index>(t.size()) != 2 * d) throw InvalidArgument("operator row has the wrong length");
    for (Eigen::Index j = 0; j < d; ++j) {
      m(i, j) = Complex(parse_double(t[static_cast<std::size_t>(2 * j)], "real part"),
                        parse_double(t[static_cast<std::size_t>(2 * j + 1)], "imaginary part"));
    }
  }
  return {std::move(labels), std::move(m)};
}

void write_ensemble(std::ostream& out, const StateEnsemble& ensemble) {
  const Labels labels = ensemble.members.empty() ? kSystemLabels : ensemble.members.front().labels();
  out << "# shieldlab-ensemble provenance=" << provenance_name(ensemble.provenance) << " seed=" << ensemble.seed
      << " members=" << ensemble.size() << " labels=" << join_labels(labels) << '\n';
  for (const auto& m : ensemble.members) {
    const RealVector v = to_bloch(m.op()).coefficients();
    for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << format_double(v(i));
    out << '\n';
  }
}

StateEnsemble read_ensemble(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty ensemble file");
  const auto f = header_fields(line, "shieldlab-ensemble");
  StateEnsemble e;
  e.provenance = provenance_from(field(f, "provenance"));
  e.seed = parse_number<std::uint64_t>(field(f, "seed"), "seed");
  const auto n = parse_number<std::size_t>(field(f, "members"), "member count");
  const Labels labels = split_labels(field(f, "labels"));
  const auto dim = bloch_dimension(labels.size());
  e.members.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::getline(in, line)) throw InvalidArgument("ensemble truncated");
    const auto t = tokens(line);
    if (static_cast<Eigen::Index>(t.size()) != dim) throw InvalidArgument("ensemble row has the wrong length");
    RealVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = parse_double(t[static_cast<std::size_t>(i)], "Bloch coefficient");
    e.members.push_back(DensityMatrix::from_numeric(from_bloch(BlochVector(labels.size(), std::move(v)), labels)));
  }
  return e;
}

void write_posterior(std::ostream& out, const PosteriorSummary& p) {
  const RealVector& mean = p.mean.coefficients();
  out << "# shieldlab-posterior qubits=" << p.mean.num_qubits() << " records=" << p.n_records << '\n';
  for (Eigen::Index i = 0; i < mean.size(); ++i) out << (i ? " " : "") << format_double(mean(i));
  out << '\n';
  for (Eigen::Index i = 0; i < p.covariance.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) out << (j ? " " : "") << format_double(p.covariance(i, j));
    out << '\n';
  }
}

PosteriorSummary read_posterior(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty posterior file");
  const auto f = header_fields(line, "shieldlab-posterior");
  const auto qubits = parse_number<std::size_t>(field(f, "qubits"), "qubit count");
  const auto dim = bloch_dimension(qubits);
  auto read_row = [&](Eigen::Index length) {
    if (!std::getline(in, line)) throw InvalidArgument("posterior truncated");
    const auto t = tokens(line);
    if (static_cast<Eigen::Index>(t.size()) != length) throw InvalidArgument("posterior row has the wrong length");
    RealVector v(length);
    for (Eigen::Index i = 0; i < length; ++i) v(i) = parse_double(t[static_cast<std::size_t>(i)], "posterior value");
    return v;
  };
  PosteriorSummary p{BlochVector(qubits, read_row(dim)), RealMatrix(dim, dim), std::nullopt,
                     parse_number<std::size_t>(field(f, "records"), "record count")};
  for (Eigen::Index i = 0; i < dim; ++i) {
    const RealVector row = read_row(i + 1);
    for (Eigen::Index j = 0; j <= i; ++j) p.covariance(i, j) = p.covariance(j, i) = row(j);
  }
  return p;
}

void write_transcript(std::ostream& out, const KeyTranscript& t) {
  out << "# shieldlab-transcript method=" << (t.method == KeyMethod::Direct ? "direct" : "distilled") << '\n';
  out << "raw_length " << t.raw_length() << '\n';
  out << "compatible_intervals " << t.compatible_intervals << '\n';
  out << "raw_alice " << to_hex(t.raw_alice) << '\n';
  out << "raw_bob " << to_hex(t.raw_bob) << '\n';
  out << "sample " << t.sample_size << " errors " << t.sample_errors << " qber " << format_double(t.qber_estimate)
      << '\n';
  for (const auto& m : t.log) {
    out << "msg " << m.round << ' ' << message_kind(m.kind) << ' ' << m.id;
    if (m.kind == MessageKind::ParityRequest) {
      out << " positions " << m.positions.size();
      for (auto p : m.positions) out << ' ' << p;
    } else if (m.kind == MessageKind::HashRequest) {
      out << " seed " << m.seed << " bits " << m.payload;
    } else {
      out << " disclosed " << m.disclosed_bits << " value " << m.payload;
    }
    out << '\n';
  }
  out << "ec_leak " << t.ec_leak << '\n';
  out << "leak " << t.leak << '\n';
  out << "corrections " << t.corrections << '\n';
  out << "chi_E_bound " << format_double(t.chi_E_bound) << '\n';
  out << "epsilon " << format_double(t.epsilon) << '\n';
  out << "formula " << t.margin_formula << '\n';
  out << "corrected_length " << t.corrected.size() << '\n';
  out << "final_length " << t.final_key.size() << '\n';
  out << "final_key " << to_hex(t.final_key) << '\n';
}

}  // namespace shieldlab
