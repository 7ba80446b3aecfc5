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

// Per-party intermediate representations: affine row-wise maps
// x -> (x - mean) P fitted by locality preserving projections or PCA.

#ifndef ICDA_DIMRED_HPP_
#define ICDA_DIMRED_HPP_

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "icda/core.hpp"

namespace icda {

enum class MapKind { Lpp, Pca };

inline const char* to_string(MapKind k) { return k == MapKind::Lpp ? "lpp" : "pca"; }

struct LppParams {
  int knn = 7;
  std::optional<double> heat_t;     // nullopt: mean squared edge length
  std::optional<double> ridge_eps;  // nullopt: 1e-6 * trace(Xc' D Xc) / m
  bool zscore = false;
};

// What a fit actually used, after defaults were resolved.
struct LppFitInfo {
  int knn = 0;
  double heat_t = 0;
  double ridge_eps = 0;
  bool zscore = false;
  bool graph_connected = true;
  int graph_components = 1;
  int edges = 0;
  Vector eigenvalues;  // nondecreasing, one per output column
};

struct LinearMap {
  Vector mean;
  Matrix P;  // in_dim x out_dim
  MapKind kind = MapKind::Pca;
  std::optional<LppFitInfo> lpp;

  Eigen::Index in_dim() const { return P.rows(); }
  Eigen::Index out_dim() const { return P.cols(); }
};

inline Matrix apply_map(const LinearMap& f, const Matrix& X) {
  if (X.cols() != f.mean.size())
    throw std::invalid_argument("apply_map: input has " + std::to_string(X.cols()) + " columns, map expects " +
                                std::to_string(f.mean.size()));
  return (X.rowwise() - f.mean.transpose()) * f.P;
}

namespace detail {

inline constexpr double kRankTolerance = 1e-10;

struct RowSpace {
  Matrix basis;  // m x rank, orthonormal columns
  Vector singular_values;
  int rank = 0;
};

inline RowSpace row_space(const Matrix& Xc) {
  Eigen::BDCSVD<Matrix> svd(Xc, Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  int rank = 0;
  if (s.size() > 0 && s(0) > 0) {
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s(k) > kRankTolerance * s(0)) ++rank;
  }
  return {svd.matrixV().leftCols(rank), s, rank};
}

struct Edge {
  int a;
  int b;
  double weight;
};

struct KnnGraph {
  std::vector<Edge> edges;  // unordered pairs, a < b
  Vector degree;
  int components = 1;
  double heat_t = 0;
};

inline int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

// Symmetric k-NN graph (edge when either endpoint is among the other's k
// nearest) with heat-kernel weights.
inline KnnGraph knn_graph(const Matrix& X, int k, std::optional<double> heat_t) {
  const int n = static_cast<int>(X.rows());
  const Matrix d2 = squared_distances(X, X);
  std::vector<std::vector<char>> adj(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    std::iota(order.begin(), order.end(), 0);
    std::swap(order[static_cast<std::size_t>(a)], order.back());
    auto by_distance = [&](int u, int v) { return d2(a, u) < d2(a, v) || (d2(a, u) == d2(a, v) && u < v); };
    std::partial_sort(order.begin(), order.begin() + k, order.end() - 1, by_distance);
    for (int q = 0; q < k; ++q) {
      const int b = order[static_cast<std::size_t>(q)];
      adj[static_cast<std::size_t>(std::min(a, b))][static_cast<std::size_t>(std::max(a, b))] = 1;
    }
  }
  KnnGraph g;
  double sum = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) {
        g.edges.push_back({a, b, 0.0});
        sum += d2(a, b);
      }
  g.heat_t = heat_t ? *heat_t : (g.edges.empty() ? 1.0 : sum / static_cast<double>(g.edges.size()));
  if (!(g.heat_t > 0)) g.heat_t = 1.0;  // every edge has length zero
  g.degree = Vector::Zero(n);
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  g.components = n;
  for (auto& e : g.edges) {
    e.weight = std::exp(-d2(e.a, e.b) / g.heat_t);
    g.degree(e.a) += e.weight;
    g.degree(e.b) += e.weight;
    const int ra = find_root(parent, e.a), rb = find_root(parent, e.b);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      --g.components;
    }
  }
  return g;
}

}  // namespace detail

// Locality preserving projections. Solves
//   (Xc' L Xc) a = lambda (Xc' D Xc + eps I) a
// for the target_dim smallest eigenvalues, restricted to the numerical row
// space of the centered data so that null directions of Xc never win.
inline LinearMap fit_lpp(const Matrix& X, int target_dim, const LppParams& params = {}) {
  const auto n = X.rows();
  const auto m = X.cols();
  if (n < 2) throw std::invalid_argument("fit_lpp: need at least 2 rows");
  if (target_dim < 1 || target_dim > m)
    throw std::invalid_argument("fit_lpp: target_dim " + std::to_string(target_dim) + " outside [1, " +
                                std::to_string(m) + "]");
  if (params.knn < 1 || params.knn >= n)
    throw std::invalid_argument("fit_lpp: knn " + std::to_string(params.knn) + " outside [1, " + std::to_string(n) + ")");
  if (params.heat_t && !(*params.heat_t > 0)) throw std::invalid_argument("fit_lpp: heat_t must be positive");
  if (params.ridge_eps && !(*params.ridge_eps >= 0)) throw std::invalid_argument("fit_lpp: ridge_eps must be >= 0");

  LinearMap f;
  f.kind = MapKind::Lpp;
  f.mean = X.colwise().mean().transpose();
  Matrix Xc = X.rowwise() - f.mean.transpose();
  Vector scale = Vector::Ones(m);
  if (params.zscore) {
    for (Eigen::Index c = 0; c < m; ++c) {
      const double sd = std::sqrt(Xc.col(c).squaredNorm() / static_cast<double>(n - 1));
      scale(c) = sd > 0 ? sd : 1.0;
    }
    Xc = Xc.array().rowwise() / scale.transpose().array();
  }

  const auto space = detail::row_space(Xc);
  if (target_dim > space.rank)
    throw Error("fit_lpp: target_dim " + std::to_string(target_dim) + " exceeds the numerical rank of the data; at most " +
                std::to_string(space.rank) + " dimensions are achievable");

  const auto graph = detail::knn_graph(Xc, params.knn, params.heat_t);
  Matrix xlx = Matrix::Zero(m, m);
  for (const auto& e : graph.edges) {
    const Vector diff = (Xc.row(e.a) - Xc.row(e.b)).transpose();
    xlx.noalias() += e.weight * diff * diff.transpose();
  }
  const Matrix xdx = Xc.transpose() * graph.degree.asDiagonal() * Xc;
  const double eps = params.ridge_eps ? *params.ridge_eps : 1e-6 * xdx.trace() / static_cast<double>(m);

  // Reduced problem in row-space coordinates b, with a = V b.
  const Matrix& V = space.basis;
  Matrix A = V.transpose() * xlx * V;
  Matrix B = V.transpose() * xdx * V;
  B.diagonal().array() += eps;
  A = 0.5 * (A + A.transpose()).eval();
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(A, B, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) throw Error("fit_lpp: generalized eigensolver failed");

  Matrix P = V * solver.eigenvectors().leftCols(target_dim);
  normalize_column_signs(P);

  LppFitInfo info;
  info.knn = params.knn;
  info.heat_t = graph.heat_t;
  info.ridge_eps = eps;
  info.zscore = params.zscore;
  info.graph_components = graph.components;
  info.graph_connected = graph.components == 1;
  info.edges = static_cast<int>(graph.edges.size());
  info.eigenvalues = solver.eigenvalues().head(target_dim);

  f.P = params.zscore ? Matrix(scale.cwiseInverse().asDiagonal() * P) : P;
  f.lpp = std::move(info);
  return f;
}

// Principal component analysis: top right singular vectors of centered X.
inline LinearMap fit_pca(const Matrix& X, int target_dim) {
  const auto n = X.rows();
  const auto m = X.cols();
  if (target_dim < 1 || target_dim > std::min(n, m))
    throw std::invalid_argument("fit_pca: target_dim " + std::to_string(target_dim) + " outside [1, min(n, m)]");
  LinearMap f;
  f.kind = MapKind::Pca;
  f.mean = X.colwise().mean().transpose();
  const Matrix Xc = X.rowwise() - f.mean.transpose();
  const auto space = detail::row_space(Xc);
  if (target_dim > space.rank)
    throw Error("fit_pca: target_dim " + std::to_string(target_dim) + " exceeds the data rank " +
                std::to_string(space.rank));
  f.P = space.basis.leftCols(target_dim);
  normalize_column_signs(f.P);
  return f;
}

}  // namespace icda

#endif  // ICDA_DIMRED_HPP_
