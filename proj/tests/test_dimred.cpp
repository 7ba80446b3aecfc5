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

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "icda/dataset.hpp"
#include "icda/dimred.hpp"
#include "test_util.hpp"

namespace icda {
namespace {

using testing::lpp_oracle;

double column_angle(const Vector& a, const Vector& b) {
  const double c = std::abs(a.normalized().dot(b.normalized()));
  return std::acos(std::min(1.0, c));
}

TEST(Lpp, GeneralizedEigenResidualAndNormalization) {
  Rng rng = make_stream(1, {});
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix X = testing::gaussian_matrix(120, 10, rng) * testing::gaussian_matrix(10, 10, rng);
    const auto f = fit_lpp(X, 4);
    ASSERT_TRUE(f.lpp);
    const auto o = lpp_oracle(X, 7, f.lpp->ridge_eps);
    const Matrix& P = f.P;
    const Vector& lam = f.lpp->eigenvalues;
    const double residual = (o.A * P - o.B * P * lam.asDiagonal()).norm() / o.A.norm();
    EXPECT_LT(residual, 1e-8);
    EXPECT_LT((P.transpose() * o.B * P - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-6);
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
      EXPECT_GE(lam(k), -1e-12);
      if (k > 0) {
        EXPECT_LE(lam(k - 1), lam(k) + 1e-12);
      }
    }
  }
}

TEST(Lpp, EigenvaluesMatchDenseOracle) {
  Rng rng = make_stream(2, {});
  const Matrix X = testing::gaussian_matrix(90, 6, rng);
  const auto f = fit_lpp(X, 6);
  const auto o = lpp_oracle(X, 7, f.lpp->ridge_eps);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> dense(o.A, o.B);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(f.lpp->eigenvalues(k), dense.eigenvalues()(k), 1e-9);
  for (int k = 0; k < 6; ++k)
    EXPECT_LT(column_angle(f.P.col(k), dense.eigenvectors().col(k)), 1e-6) << "column " << k;
}

TEST(Lpp, RecoversLineCoordinate) {
  // The coefficient vector is not identified along the noise direction, so
  // the check is on the projected values: they must track the position along
  // y = x.
  Rng rng = make_stream(3, {});
  std::uniform_real_distribution<double> along(-5.0, 5.0);
  std::normal_distribution<double> noise(0.0, 1e-4);
  Matrix X(200, 2);
  Vector s(200);
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    s(r) = along(rng);
    X(r, 0) = s(r) + noise(rng);
    X(r, 1) = s(r) + noise(rng);
  }
  const auto f = fit_lpp(X, 1);
  const Vector z = apply_map(f, X).col(0);
  const Vector zc = z.array() - z.mean();
  const Vector sc = s.array() - s.mean();
  EXPECT_GT(std::abs(zc.dot(sc)) / (zc.norm() * sc.norm()), 1.0 - 1e-6);

  const auto o = lpp_oracle(X, 7, f.lpp->ridge_eps);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> dense(o.A, o.B);
  EXPECT_LT(column_angle(f.P.col(0), dense.eigenvectors().col(0)), 1e-6);
}

TEST(Lpp, ArtificialBlockShapes) {
  auto d = generate_artificial({1600, 1, 0.3, 0.3, 0});
  const auto f = fit_lpp(d.train.block(0, 0), 4);
  EXPECT_EQ(f.P.rows(), 10);
  EXPECT_EQ(f.P.cols(), 4);
  EXPECT_EQ(apply_map(f, d.train.block(0, 0)).rows(), 800);
  EXPECT_EQ(apply_map(f, d.train.block(0, 0)).cols(), 4);
}

TEST(Lpp, FewerRowsThanFeatures) {
  Rng rng = make_stream(4, {});
  const Matrix X = testing::gaussian_matrix(6, 10, rng);
  LppParams p;
  p.knn = 3;
  const auto f = fit_lpp(X, 5, p);  // centered rank is 5
  const auto o = lpp_oracle(X, 3, f.lpp->ridge_eps);
  EXPECT_LT((o.A * f.P - o.B * f.P * f.lpp->eigenvalues.asDiagonal()).norm() / o.A.norm(), 1e-8);
  try {
    fit_lpp(X, 6, p);
    FAIL() << "rank-deficient target accepted";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("at most 5 dimensions"), std::string::npos) << e.what();
  }
}

TEST(Lpp, DisconnectedGraphIsFlagged) {
  Rng rng = make_stream(5, {});
  Matrix X = testing::gaussian_matrix(40, 3, rng);
  X.topRows(20).array() += 1000.0;
  LppParams p;
  p.knn = 3;
  const auto f = fit_lpp(X, 2, p);
  EXPECT_FALSE(f.lpp->graph_connected);
  EXPECT_EQ(f.lpp->graph_components, 2);
}

TEST(Lpp, ArgumentChecks) {
  const Matrix X = Matrix::Random(10, 3);
  EXPECT_THROW(fit_lpp(X, 0), std::invalid_argument);
  EXPECT_THROW(fit_lpp(X, 4), std::invalid_argument);
  LppParams big;
  big.knn = 10;
  EXPECT_THROW(fit_lpp(X, 2, big), std::invalid_argument);
  EXPECT_THROW(fit_lpp(Matrix::Random(1, 3), 1), std::invalid_argument);
}

TEST(Lpp, ZscoreAppliesScalingInsideTheMap) {
  Rng rng = make_stream(6, {});
  Matrix X = testing::gaussian_matrix(80, 4, rng);
  X.col(2) *= 100.0;
  LppParams p;
  p.zscore = true;
  const auto f = fit_lpp(X, 2, p);
  // Same fit on pre-standardized data gives the same projected values.
  RowVector sd(4);
  const Matrix Xc = X.rowwise() - X.colwise().mean();
  for (int c = 0; c < 4; ++c) sd(c) = std::sqrt(Xc.col(c).squaredNorm() / 79.0);
  const Matrix Z = Xc.array().rowwise() / sd.array();
  const auto g = fit_lpp(Z, 2);
  EXPECT_LT((apply_map(f, X) - apply_map(g, Z)).norm() / apply_map(g, Z).norm(), 1e-8);
}

TEST(Lpp, InvariantToRowPermutation) {
  Rng rng = make_stream(7, {});
  const Matrix X = testing::gaussian_matrix(60, 5, rng);
  std::vector<int> perm(60);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto f = fit_lpp(X, 3);
  const auto g = fit_lpp(gather_rows(X, perm), 3);
  EXPECT_LT((f.P - g.P).norm() / f.P.norm(), 1e-8);
}

TEST(Pca, RankOneReconstruction) {
  Rng rng = make_stream(8, {});
  const Matrix X = testing::gaussian_matrix(50, 1, rng) * testing::gaussian_matrix(1, 6, rng);
  const auto f = fit_pca(X, 1);
  const Matrix Xc = X.rowwise() - X.colwise().mean();
  EXPECT_LT((Xc * f.P * f.P.transpose() - Xc).norm() / Xc.norm(), 1e-10);
}

TEST(Pca, IsotropicDataHasEqualVariances) {
  Rng rng = make_stream(9, {});
  const Matrix X = testing::gaussian_matrix(20000, 2, rng);
  const auto f = fit_pca(X, 2);
  const Matrix Y = apply_map(f, X);
  const double v0 = Y.col(0).squaredNorm() / 19999.0;
  const double v1 = Y.col(1).squaredNorm() / 19999.0;
  EXPECT_NEAR(v0 / v1, 1.0, 0.05);
  EXPECT_GE(v0, v1);
}

TEST(Pca, VariancesNonincreasingAndRankError) {
  Rng rng = make_stream(10, {});
  const Matrix X = testing::gaussian_matrix(100, 6, rng) * testing::gaussian_matrix(6, 6, rng);
  const Matrix Y = apply_map(fit_pca(X, 6), X);
  for (int k = 1; k < 6; ++k) EXPECT_GE(Y.col(k - 1).squaredNorm(), Y.col(k).squaredNorm());

  const Matrix R2 = testing::gaussian_matrix(50, 2, rng) * testing::gaussian_matrix(2, 4, rng);
  EXPECT_NO_THROW(fit_pca(R2, 2));
  EXPECT_THROW(fit_pca(R2, 3), Error);
}

TEST(Pca, InvariantToRowPermutation) {
  Rng rng = make_stream(11, {});
  const Matrix X = testing::gaussian_matrix(40, 5, rng) * testing::gaussian_matrix(5, 5, rng);
  std::vector<int> perm(40);
  std::iota(perm.rbegin(), perm.rend(), 0);
  EXPECT_LT((fit_pca(X, 3).P - fit_pca(gather_rows(X, perm), 3).P).norm(), 1e-8);
}

TEST(ApplyMap, CentersAndIsRowWise) {
  Rng rng = make_stream(12, {});
  const Matrix X = testing::gaussian_matrix(30, 5, rng);
  for (const auto& f : {fit_pca(X, 2), fit_lpp(X, 2)}) {
    const Matrix mean_row = X.colwise().mean();
    EXPECT_LT(apply_map(f, mean_row).norm(), 1e-12);
    const Matrix A = testing::gaussian_matrix(4, 5, rng);
    const Matrix B = testing::gaussian_matrix(7, 5, rng);
    Matrix AB(11, 5);
    AB << A, B;
    Matrix expect(11, 2);
    expect << apply_map(f, A), apply_map(f, B);
    EXPECT_LT((apply_map(f, AB) - expect).norm(), 1e-12);
    EXPECT_THROW(apply_map(f, Matrix::Zero(2, 4)), std::invalid_argument);
  }
}

TEST(ApplyMap, ProjectionHasFullColumnRank) {
  Rng rng = make_stream(13, {});
  const Matrix X = testing::gaussian_matrix(100, 8, rng);
  for (const auto& f : {fit_pca(X, 5), fit_lpp(X, 5)}) {
    Eigen::JacobiSVD<Matrix> svd(f.P);
    const auto& s = svd.singularValues();
    EXPECT_GT(s(s.size() - 1), 1e-8 * s(0));
  }
}

}  // namespace
}  // namespace icda
