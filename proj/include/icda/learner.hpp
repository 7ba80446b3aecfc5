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

#ifndef ICDA_LEARNER_HPP_
#define ICDA_LEARNER_HPP_

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "icda/core.hpp"
#include "icda/dataset.hpp"

namespace icda {

// Gaussian-kernel ridge regression, k(x, y) = exp(-gamma ||x - y||^2),
// with dual coefficients solving (K + lambda I) alpha = Y.
struct KrrModel {
  Matrix support;  // n x p
  Matrix alpha;    // n x l
  double lambda = 0.01;
  double gamma = 1.0;
  int class_count = 0;
  double solve_residual = 0;  // ||(K + lambda I) alpha - Y||_F / ||Y||_F
};

inline Matrix gaussian_kernel(const Matrix& a, const Matrix& b, double gamma) {
  return (-gamma * squared_distances(a, b).array()).exp().matrix();
}

// 1 / median squared pairwise distance, over at most `sample_cap` rows drawn
// without replacement when the input is larger.
inline double median_gamma(const Matrix& X, int sample_cap = 2000, std::uint64_t seed = 0) {
  if (X.rows() < 2) throw std::invalid_argument("median_gamma: need at least 2 rows");
  if (sample_cap < 2) throw std::invalid_argument("median_gamma: sample_cap must be >= 2");
  std::vector<int> idx(static_cast<std::size_t>(X.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  if (X.rows() > sample_cap) {
    Rng rng = make_stream(seed, {0x6A33});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<std::size_t>(sample_cap));
    std::sort(idx.begin(), idx.end());
  }
  const Matrix S = gather_rows(X, idx);
  const Matrix d2 = squared_distances(S, S);
  std::vector<double> pairs;
  pairs.reserve(idx.size() * (idx.size() - 1) / 2);
  for (Eigen::Index a = 0; a < d2.rows(); ++a)
    for (Eigen::Index b = a + 1; b < d2.cols(); ++b) pairs.push_back(d2(a, b));
  const auto half = static_cast<std::ptrdiff_t>(pairs.size() / 2);
  std::nth_element(pairs.begin(), pairs.begin() + half, pairs.end());
  double median = pairs[static_cast<std::size_t>(half)];
  if (pairs.size() % 2 == 0) median = 0.5 * (median + *std::max_element(pairs.begin(), pairs.begin() + half));
  if (!(median > 0))
    throw Error("median_gamma: median squared distance is zero (rows coincide); set gamma explicitly");
  return 1.0 / median;
}

inline KrrModel fit_krr(const Matrix& X, const GroundTruth& Y, double lambda, double gamma) {
  if (X.rows() < 1) throw std::invalid_argument("fit_krr: empty training set");
  if (Y.Y.rows() != X.rows())
    throw std::invalid_argument("fit_krr: " + std::to_string(Y.Y.rows()) + " target rows for " +
                                std::to_string(X.rows()) + " samples");
  if (!(lambda >= 0)) throw std::invalid_argument("fit_krr: lambda must be >= 0");
  if (!(gamma > 0)) throw std::invalid_argument("fit_krr: gamma must be positive");

  Matrix K = gaussian_kernel(X, X, gamma);
  K.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success)
    throw Error("fit_krr: K + lambda I is not numerically positive definite; use lambda > 0");
  KrrModel m;
  m.support = X;
  m.alpha = llt.solve(Y.Y);
  m.lambda = lambda;
  m.gamma = gamma;
  m.class_count = static_cast<int>(Y.Y.cols());
  const double y_norm = Y.Y.norm();
  m.solve_residual = (K * m.alpha - Y.Y).norm() / (y_norm > 0 ? y_norm : 1.0);
  return m;
}

// Scores in rows; hard labels come from row_argmax.
inline Matrix predict_krr(const KrrModel& model, const Matrix& X) {
  if (X.cols() != model.support.cols())
    throw std::invalid_argument("predict_krr: query has " + std::to_string(X.cols()) + " columns, model expects " +
                                std::to_string(model.support.cols()));
  if (X.rows() == 0) return Matrix(0, model.alpha.cols());
  return gaussian_kernel(X, model.support, model.gamma) * model.alpha;
}

}  // namespace icda

#endif  // ICDA_LEARNER_HPP_
