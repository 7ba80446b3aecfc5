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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "icda/metrics.hpp"
#include "test_util.hpp"

namespace icda {
namespace {

TEST(Accuracy, Examples) {
  EXPECT_DOUBLE_EQ(accuracy(Labels{0, 1, 2}, Labels{0, 1, 2}), 100.0);
  EXPECT_NEAR(accuracy(Labels{1, 1, 0}, Labels{1, 0, 0}), 200.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(accuracy(Labels{0, 0}, Labels{1, 1}), 0.0);
}

TEST(Accuracy, Errors) {
  EXPECT_THROW(accuracy(Labels{0}, Labels{0, 1}), std::invalid_argument);
  EXPECT_THROW(accuracy(Labels{}, Labels{}), std::invalid_argument);
}

TEST(Accuracy, JointPermutationInvariance) {
  Rng rng = make_stream(1, {});
  for (int trial = 0; trial < 100; ++trial) {
    Labels a = testing::random_labels(30, 3, rng);
    Labels b = testing::random_labels(30, 3, rng);
    const double before = accuracy(a, b);
    std::vector<int> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Labels ap(30), bp(30);
    for (std::size_t k = 0; k < 30; ++k) {
      ap[k] = a[static_cast<std::size_t>(perm[k])];
      bp[k] = b[static_cast<std::size_t>(perm[k])];
    }
    EXPECT_EQ(accuracy(ap, bp), before);
  }
}

TEST(Nmi, Examples) {
  EXPECT_NEAR(nmi(Labels{0, 0, 1, 1, 2}, Labels{0, 0, 1, 1, 2}), 1.0, 1e-12);
  EXPECT_NEAR(nmi(Labels{0, 0, 1, 1, 2}, Labels{7, 7, 3, 3, 5}), 1.0, 1e-12);
  EXPECT_NEAR(nmi(Labels{0, 0, 1, 1}, Labels{0, 1, 0, 1}), 0.0, 1e-12);
}

TEST(Nmi, HandComputedValue) {
  // a = [0,0,1,1], b = [0,0,0,1]: H(a) = ln 2, H(b) = -(3/4 ln 3/4 + 1/4 ln 1/4),
  // I = sum p(x,y) ln(p(x,y) / p(x)p(y)) over the three occupied cells.
  const double ha = std::log(2.0);
  const double hb = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  const double mi = 0.5 * std::log(0.5 / (0.5 * 0.75)) + 0.25 * std::log(0.25 / (0.5 * 0.75)) +
                    0.25 * std::log(0.25 / (0.5 * 0.25));
  EXPECT_NEAR(nmi(Labels{0, 0, 1, 1}, Labels{0, 0, 0, 1}), mi / std::sqrt(ha * hb), 1e-12);
}

TEST(Nmi, DegenerateConventions) {
  EXPECT_DOUBLE_EQ(nmi(Labels{3, 3, 3}, Labels{1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(nmi(Labels{3, 3, 3}, Labels{0, 1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(nmi(Labels{0, 1, 2}, Labels{3, 3, 3}), 0.0);
  EXPECT_THROW(nmi(Labels{0}, Labels{0, 1}), std::invalid_argument);
  EXPECT_THROW(nmi(Labels{}, Labels{}), std::invalid_argument);
}

TEST(Nmi, RandomPairProperties) {
  Rng rng = make_stream(2, {});
  std::uniform_int_distribution<int> len(1, 40), classes(1, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(len(rng));
    const Labels a = testing::random_labels(n, classes(rng), rng);
    const Labels b = testing::random_labels(n, classes(rng), rng);
    const double v = nmi(a, b);
    EXPECT_EQ(v, nmi(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 + 1e-12);
  }
}

TEST(Nmi, RelabelingInvariance) {
  Rng rng = make_stream(3, {});
  for (int trial = 0; trial < 100; ++trial) {
    const Labels a = testing::random_labels(50, 4, rng);
    const Labels b = testing::random_labels(50, 3, rng);
    std::vector<int> relabel{2, 0, 3, 1};
    Labels ar(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) ar[k] = relabel[static_cast<std::size_t>(a[k])];
    EXPECT_NEAR(nmi(ar, b), nmi(a, b), 1e-12);
  }
}

TEST(Fidelity, Examples) {
  EXPECT_NEAR(fidelity_to_ca(Labels{0, 1, 1, 0}, Labels{0, 1, 1, 0}), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(fidelity_to_ca(Labels{1, 1, 1, 1}, Labels{0, 1, 1, 0}), 0.0);
  Rng rng = make_stream(4, {});
  const Labels a = testing::random_labels(30, 3, rng);
  const Labels b = testing::random_labels(30, 3, rng);
  EXPECT_EQ(fidelity_to_ca(a, b), nmi(a, b));
}

TEST(ScoreMethod, FidelityPresence) {
  const Labels truth{0, 1, 0, 1};
  EXPECT_FALSE(score_method(truth, truth, std::nullopt).fidelity.has_value());
  const auto s = score_method(Labels{0, 1, 1, 1}, truth, std::span<const int>(truth));
  ASSERT_TRUE(s.fidelity.has_value());
  EXPECT_DOUBLE_EQ(s.acc_percent, 75.0);
}

TEST(Summarize, Examples) {
  const auto two = summarize(std::vector<double>{50, 60});
  EXPECT_DOUBLE_EQ(two.mean, 55.0);
  ASSERT_TRUE(two.standard_error.has_value());
  EXPECT_NEAR(*two.standard_error, 5.0, 1e-12);
  EXPECT_FALSE(summarize(std::vector<double>{42}).standard_error.has_value());
  const auto same = summarize(std::vector<double>(10, 0.7));
  EXPECT_NEAR(same.mean, 0.7, 1e-15);
  EXPECT_NEAR(*same.standard_error, 0.0, 1e-12);
  EXPECT_THROW(summarize(std::vector<double>{}), std::invalid_argument);
}

TEST(Aggregate, MethodsAndFidelity) {
  auto trial = [](double acc_ca, double acc_cda) {
    return TrialReport{{"CA", {1.0, acc_ca, std::nullopt}}, {"CDA-analyst", {0.8, acc_cda, 0.9}}};
  };
  const auto r = aggregate({trial(90, 50), trial(100, 60)});
  ASSERT_EQ(r.methods.size(), 2u);
  EXPECT_EQ(r.methods[0].method, "CA");
  EXPECT_FALSE(r.methods[0].fidelity.has_value());
  EXPECT_DOUBLE_EQ(r.find("CDA-analyst")->acc_percent.mean, 55.0);
  EXPECT_NEAR(*r.find("CDA-analyst")->acc_percent.standard_error, 5.0, 1e-12);
  EXPECT_NEAR(r.find("CDA-analyst")->fidelity->mean, 0.9, 1e-15);
  EXPECT_EQ(r.find("CDA-analyst")->trials, 2);
  EXPECT_EQ(r.find("missing"), nullptr);
}

TEST(Aggregate, Errors) {
  EXPECT_THROW(aggregate({}), std::invalid_argument);
  const TrialReport with{{"X", {0.5, 50, 0.5}}};
  const TrialReport without{{"X", {0.5, 50, std::nullopt}}};
  EXPECT_THROW(aggregate({with, without}), std::invalid_argument);
}

}  // namespace
}  // namespace icda
