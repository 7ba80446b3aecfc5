/*
 * Copyright 2026 The icda Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ICDA_METRICS_HPP_
#define ICDA_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "icda/core.hpp"

namespace icda {

// Percentage of positions where pred equals truth.
inline double accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (pred.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) hits += pred[k] == truth[k];
  return 100.0 * static_cast<double>(hits) / static_cast<double>(pred.size());
}

// Normalized mutual information I(a; b) / sqrt(H(a) H(b)) from empirical
// joint counts, natural logs. Both partitions trivial gives 1; exactly one
// trivial gives 0.
inline double nmi(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("nmi: length mismatch");
  if (a.empty()) throw std::invalid_argument("nmi: empty input");
  const double n = static_cast<double>(a.size());
  std::map<int, double> ca, cb;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ca[a[k]] += 1;
    cb[b[k]] += 1;
    joint[{a[k], b[k]}] += 1;
  }
  auto entropy = [n](const std::map<int, double>& counts) {
    double h = 0;
    for (const auto& [label, c] : counts) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double ha = entropy(ca);
  const double hb = entropy(cb);
  const bool trivial_a = ca.size() == 1;
  const bool trivial_b = cb.size() == 1;
  if (trivial_a && trivial_b) return 1.0;
  if (trivial_a || trivial_b) return 0.0;
  // Summing sorted terms makes nmi(a, b) and nmi(b, a) bit-identical.
  std::vector<double> terms;
  terms.reserve(joint.size());
  for (const auto& [key, c] : joint) terms.push_back((c / n) * std::log((c * n) / (ca[key.first] * cb[key.second])));
  std::sort(terms.begin(), terms.end());
  double mi = 0;
  for (double t : terms) mi += t;
  return std::max(0.0, mi / std::sqrt(ha * hb));
}

inline double fidelity_to_ca(std::span<const int> pred_method, std::span<const int> pred_ca) {
  return nmi(pred_method, pred_ca);
}

struct MethodScores {
  double nmi = 0;
  double acc_percent = 0;
  std::optional<double> fidelity;  // absent for the centralized method
};

inline MethodScores score_method(std::span<const int> pred, std::span<const int> truth,
                                 std::optional<std::span<const int>> ca_pred) {
  MethodScores s{nmi(pred, truth), accuracy(pred, truth), std::nullopt};
  if (ca_pred) s.fidelity = fidelity_to_ca(pred, *ca_pred);
  return s;
}

struct Summary {
  double mean = 0;
  std::optional<double> standard_error;  // absent for a single trial
};

inline Summary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  double sum = 0;
  for (double v : values) sum += v;
  Summary s{sum / static_cast<double>(values.size()), std::nullopt};
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    s.standard_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return s;
}

struct MethodSummary {
  std::string method;
  Summary nmi;
  Summary acc_percent;
  std::optional<Summary> fidelity;
  int trials = 0;
};

// One entry per trial: method name -> scores. Methods keep the order of
// their first appearance.
using TrialReport = std::vector<std::pair<std::string, MethodScores>>;

struct MetricsReport {
  std::vector<MethodSummary> methods;

  const MethodSummary* find(const std::string& name) const {
    for (const auto& m : methods)
      if (m.method == name) return &m;
    return nullptr;
  }
};

inline MetricsReport aggregate(const std::vector<TrialReport>& trials) {
  if (trials.empty()) throw std::invalid_argument("aggregate: no trials");
  std::vector<std::string> order;
  std::map<std::string, std::vector<MethodScores>> by_method;
  for (const auto& trial : trials)
    for (const auto& [name, scores] : trial) {
      if (!by_method.count(name)) order.push_back(name);
      by_method[name].push_back(scores);
    }
  MetricsReport report;
  for (const auto& name : order) {
    const auto& rows = by_method[name];
    std::vector<double> n, a, f;
    for (const auto& r : rows) {
      n.push_back(r.nmi);
      a.push_back(r.acc_percent);
      if (r.fidelity) f.push_back(*r.fidelity);
    }
    MethodSummary s{name, summarize(n), summarize(a), std::nullopt, static_cast<int>(rows.size())};
    if (!f.empty()) {
      if (f.size() != rows.size())
        throw std::invalid_argument("aggregate: method '" + name + "' has fidelity in only some trials");
      s.fidelity = summarize(f);
    }
    report.methods.push_back(std::move(s));
  }
  return report;
}

}  // namespace icda

#endif  // ICDA_METRICS_HPP_
