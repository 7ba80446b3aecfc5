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

// Analyst-side alignment of per-institution intermediate representations
// into one collaboration space.
//
// The target U is the top-m_hat left singular subspace of the horizontally
// concatenated anchor intermediates [X~_1^anc, ..., X~_c^anc], with
// m_hat = min_i m~_i. Each institution then gets a linear map G_i fitted so
// that X~_i^anc G_i ~ U, by total least squares (default) or ordinary least
// squares.

#ifndef ICDA_COLLABORATION_HPP_
#define ICDA_COLLABORATION_HPP_

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "icda/core.hpp"

namespace icda {

enum class AlignmentSolver { Tls, Ls };

inline const char* to_string(AlignmentSolver s) { return s == AlignmentSolver::Tls ? "tls" : "ls"; }

struct TargetSubspace {
  Matrix U;  // r x m_hat, orthonormal columns
  int m_hat = 0;
  Vector singular_values;  // of the concatenation, all of them
  bool underdetermined = false;  // r <= sum_i m~_i
};

struct TargetOptions {
  bool center = false;  // subtract column means of the concatenation before the SVD
};

inline TargetSubspace target_subspace(const std::vector<Matrix>& anchor_intermediates, const TargetOptions& opt = {}) {
  if (anchor_intermediates.empty()) throw std::invalid_argument("target_subspace: no anchor intermediates");
  const auto r = anchor_intermediates.front().rows();
  int m_hat = std::numeric_limits<int>::max();
  Eigen::Index total = 0;
  for (const auto& x : anchor_intermediates) {
    if (x.rows() != r) throw std::invalid_argument("target_subspace: anchor intermediates differ in row count");
    m_hat = std::min(m_hat, static_cast<int>(x.cols()));
    total += x.cols();
  }
  Matrix Z = hstack(std::span<const Matrix>(anchor_intermediates));
  if (opt.center) Z = Z.rowwise() - Z.colwise().mean();

  Eigen::BDCSVD<Matrix> svd(Z, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  int rank = 0;
  if (s.size() > 0 && s(0) > 0)
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s(k) > 1e-10 * s(0)) ++rank;
  if (rank < m_hat)
    throw Error("target_subspace: concatenated anchor intermediates have rank " + std::to_string(rank) +
                ", below m_hat = " + std::to_string(m_hat) + "; at most " + std::to_string(rank) +
                " collaboration dimensions are achievable");

  TargetSubspace t;
  t.U = svd.matrixU().leftCols(m_hat);
  normalize_column_signs(t.U);
  t.m_hat = m_hat;
  t.singular_values = s;
  t.underdetermined = r <= total;
  return t;
}

struct LsSolution {
  Matrix G;
  int rank = 0;
};

// Minimum-norm least squares: G = pinv(A) B.
inline LsSolution solve_ls(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows()) throw std::invalid_argument("solve_ls: A and B differ in row count");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  return {cod.solve(B), static_cast<int>(cod.rank())};
}

struct TlsSolution {
  Matrix G;
  double correction_norm = 0;  // ||[E F]||_F of the minimal correction
  bool fell_back_to_ls = false;
  bool underdetermined = false;  // r < p + q
  double v22_condition = 0;
};

inline constexpr double kTlsConditionLimit = 1e12;

// Total least squares for A G ~ B (A: r x p, B: r x q). With the SVD
// [A B] = W S V', split V so V12 (p x q) and V22 (q x q) span the q smallest
// singular directions; then G = -V12 V22^{-1}. Falls back to solve_ls when
// V22 is numerically singular.
inline TlsSolution solve_tls(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows()) throw std::invalid_argument("solve_tls: A and B differ in row count");
  const auto p = A.cols();
  const auto q = B.cols();
  Matrix C(A.rows(), p + q);
  C << A, B;
  Eigen::JacobiSVD<Matrix> svd(C, Eigen::ComputeFullV);
  const Matrix& V = svd.matrixV();
  const Matrix V12 = V.block(0, p, p, q);
  const Matrix V22 = V.block(p, p, q, q);

  TlsSolution out;
  out.underdetermined = A.rows() < p + q;
  const Vector& s = svd.singularValues();
  // Singular values beyond the row count are exactly zero.
  double tail = 0;
  for (Eigen::Index k = p; k < p + q; ++k) tail += k < s.size() ? s(k) * s(k) : 0.0;
  out.correction_norm = std::sqrt(tail);

  Eigen::JacobiSVD<Matrix> v22_svd(V22);
  const Vector& sv = v22_svd.singularValues();
  const double smallest = sv.size() ? sv(sv.size() - 1) : 0.0;
  out.v22_condition = smallest > 0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
  if (!(out.v22_condition <= kTlsConditionLimit)) {
    auto ls = solve_ls(A, B);
    out.G = std::move(ls.G);
    out.fell_back_to_ls = true;
    out.correction_norm = (A * out.G - B).norm();
    return out;
  }
  out.G = -V12 * V22.fullPivLu().inverse();
  return out;
}

struct InstitutionAlignment {
  Matrix G;  // m~_i x m_hat
  double residual = 0;  // ||X~_i^anc G_i - U||_F / ||U||_F
  bool fell_back_to_ls = false;
};

struct CollaborationSpace {
  Matrix U;
  int m_hat = 0;
  AlignmentSolver solver = AlignmentSolver::Tls;
  std::vector<InstitutionAlignment> maps;
  bool underdetermined_target = false;

  // g_i(X~) = X~ G_i
  Matrix apply(int institution, const Matrix& intermediate) const {
    const auto& G = maps.at(static_cast<std::size_t>(institution)).G;
    if (intermediate.cols() != G.rows())
      throw std::invalid_argument("collaboration: institution " + std::to_string(institution) + " expects " +
                                  std::to_string(G.rows()) + " intermediate columns, got " +
                                  std::to_string(intermediate.cols()));
    return intermediate * G;
  }
  bool any_fallback() const {
    return std::any_of(maps.begin(), maps.end(), [](const auto& m) { return m.fell_back_to_ls; });
  }
};

struct CollaborationResult {
  CollaborationSpace space;
  Matrix X_hat;  // n x m_hat, institutions stacked in index order
};

inline CollaborationSpace fit_collaboration(const std::vector<Matrix>& anchor_intermediates, AlignmentSolver solver,
                                            const TargetOptions& opt = {}) {
  auto target = target_subspace(anchor_intermediates, opt);
  CollaborationSpace cs;
  cs.m_hat = target.m_hat;
  cs.solver = solver;
  cs.underdetermined_target = target.underdetermined;
  const double u_norm = target.U.norm();
  for (const auto& a : anchor_intermediates) {
    InstitutionAlignment al;
    if (solver == AlignmentSolver::Tls) {
      auto tls = solve_tls(a, target.U);
      al.G = std::move(tls.G);
      al.fell_back_to_ls = tls.fell_back_to_ls;
    } else {
      al.G = solve_ls(a, target.U).G;
    }
    if (!al.G.allFinite()) throw Error("collaboration: non-finite alignment map");
    al.residual = (a * al.G - target.U).norm() / u_norm;
    cs.maps.push_back(std::move(al));
  }
  cs.U = std::move(target.U);
  return cs;
}

inline CollaborationResult build_collaboration(const std::vector<Matrix>& anchor_intermediates,
                                               const std::vector<Matrix>& data_intermediates, AlignmentSolver solver,
                                               const TargetOptions& opt = {}) {
  if (anchor_intermediates.size() != data_intermediates.size())
    throw std::invalid_argument("build_collaboration: anchor and data intermediates differ in institution count");
  for (std::size_t i = 0; i < anchor_intermediates.size(); ++i)
    if (anchor_intermediates[i].cols() != data_intermediates[i].cols())
      throw std::invalid_argument("build_collaboration: institution " + std::to_string(i) + " has " +
                                  std::to_string(anchor_intermediates[i].cols()) + " anchor columns but " +
                                  std::to_string(data_intermediates[i].cols()) + " data columns");
  CollaborationResult out{fit_collaboration(anchor_intermediates, solver, opt), {}};
  std::vector<Matrix> parts;
  for (std::size_t i = 0; i < data_intermediates.size(); ++i)
    parts.push_back(out.space.apply(static_cast<int>(i), data_intermediates[i]));
  out.X_hat = vstack(parts);
  return out;
}

}  // namespace icda

#endif  // ICDA_COLLABORATION_HPP_
