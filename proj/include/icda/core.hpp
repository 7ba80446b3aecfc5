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

#ifndef ICDA_CORE_HPP_
#define ICDA_CORE_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace icda {

// Row-major semantics: one sample per row, one feature per column.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Labels = std::vector<int>;
using Rng = std::mt19937_64;

// Raised for numerical failures (rank too low, factorization failure, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Builds an independent, reproducible random stream from a base seed and a
// list of stream coordinates, e.g. {institution, party, purpose}.
inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (keys.size() + 1));
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto k : keys) push(k);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

// Row-wise argmax; ties go to the lowest column index.
inline Labels row_argmax(const Matrix& scores) {
  Labels out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(r, c) > scores(r, best)) best = c;
    }
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

// Flip each column so its largest-magnitude entry is positive.
inline void normalize_column_signs(Matrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::Index arg = 0;
    m.col(c).cwiseAbs().maxCoeff(&arg);
    if (m(arg, c) < 0) m.col(c) *= -1.0;
  }
}

inline Matrix gather_rows(const Matrix& m, std::span<const int> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(rows[k]);
  return out;
}

inline Matrix vstack(std::span<const Matrix> parts) {
  Eigen::Index rows = 0;
  Eigen::Index cols = parts.empty() ? 0 : parts.front().cols();
  for (const auto& p : parts) {
    if (p.cols() != cols) throw std::invalid_argument("vstack: column count mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleRows(at, p.rows()) = p;
    at += p.rows();
  }
  return out;
}

inline Matrix hstack(std::span<const Matrix> parts) {
  Eigen::Index cols = 0;
  Eigen::Index rows = parts.empty() ? 0 : parts.front().rows();
  for (const auto& p : parts) {
    if (p.rows() != rows) throw std::invalid_argument("hstack: row count mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.cols()) = p;
    at += p.cols();
  }
  return out;
}

// Squared Euclidean distances between the rows of a and the rows of b,
// computed from explicit differences so that d(x, x) == 0 exactly.
inline Matrix squared_distances(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("squared_distances: column count mismatch");
  const Matrix bt = b.transpose();
  Matrix d(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Vector x = a.row(i).transpose();
    for (Eigen::Index j = 0; j < b.rows(); ++j) d(i, j) = (bt.col(j) - x).squaredNorm();
  }
  return d;
}

}  // namespace icda

#endif  // ICDA_CORE_HPP_
