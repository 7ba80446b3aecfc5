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

// Shareable anchor data. Each party (i, j) generates its own block from its
// private X_{i,j} only; blocks are then assembled into the r x m anchor.

#ifndef ICDA_ANCHOR_HPP_
#define ICDA_ANCHOR_HPP_

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "icda/core.hpp"
#include "icda/dataset.hpp"

namespace icda {

enum class AnchorMethod { UniformRandom, SvdPerturb };

inline const char* to_string(AnchorMethod m) { return m == AnchorMethod::UniformRandom ? "uniform" : "svd"; }

struct AnchorSet {
  Matrix X;                      // r x m
  std::vector<int> col_offsets;  // same boundaries as the partition
  std::vector<int> row_offsets;  // row-group boundaries, one group per institution
  std::vector<int> row_provenance;
  AnchorMethod method = AnchorMethod::SvdPerturb;
  // Separate anchor used only for distillation; empty when the alignment
  // anchor is reused.
  std::optional<Matrix> interp;

  Eigen::Index rows() const { return X.rows(); }
  int parties() const { return static_cast<int>(col_offsets.size()) - 1; }
  // X^anc_{:,j}
  Matrix slice(int j) const { return X.middleCols(col_offsets[j], col_offsets[j + 1] - col_offsets[j]); }
  Matrix interp_slice(int j) const {
    return interp->middleCols(col_offsets[j], col_offsets[j + 1] - col_offsets[j]);
  }
  const Matrix& distillation_inputs() const { return interp ? *interp : X; }
};

// i.i.d. uniform entries within [mins(k), maxs(k)] per column.
inline Matrix generate_uniform_anchor(const Vector& mins, const Vector& maxs, int rows, Rng& rng) {
  if (mins.size() != maxs.size()) throw std::invalid_argument("generate_uniform_anchor: range length mismatch");
  if (rows < 1) throw std::invalid_argument("generate_uniform_anchor: rows must be >= 1");
  for (Eigen::Index k = 0; k < mins.size(); ++k)
    if (!(mins(k) <= maxs(k)))
      throw std::invalid_argument("generate_uniform_anchor: min > max for feature " + std::to_string(k));
  Matrix out(rows, mins.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index k = 0; k < out.cols(); ++k) out(r, k) = mins(k) + (maxs(k) - mins(k)) * unit(rng);
  return out;
}

// Smallest k whose leading singular values hold >= `mass` of the total
// squared singular-value mass. Returns at least 1.
inline int energy_rank(const Vector& singular_values, double mass = 0.95) {
  const double total = singular_values.squaredNorm();
  if (total <= 0) return 1;
  double acc = 0;
  for (Eigen::Index k = 0; k < singular_values.size(); ++k) {
    acc += singular_values(k) * singular_values(k);
    if (acc >= mass * total) return static_cast<int>(k + 1);
  }
  return static_cast<int>(singular_values.size());
}

// Bootstrap rows of X_ij, project the centered rows onto the top-`rank`
// right singular subspace, add Gaussian noise scaled per feature by
// noise_ratio * sample std, and restore the column means.
inline Matrix generate_svd_anchor(const Matrix& X_ij, int rows, std::optional<int> rank, double noise_ratio, Rng& rng) {
  if (rows < 1) throw std::invalid_argument("generate_svd_anchor: rows must be >= 1");
  if (X_ij.rows() < 1) throw std::invalid_argument("generate_svd_anchor: empty source block");
  if (!(noise_ratio >= 0)) throw std::invalid_argument("generate_svd_anchor: noise_ratio must be >= 0");
  const auto n = X_ij.rows();
  const auto m = X_ij.cols();
  const RowVector mean = X_ij.colwise().mean();
  const Matrix Xc = X_ij.rowwise() - mean;

  Eigen::BDCSVD<Matrix> svd(Xc, Eigen::ComputeThinV);
  const auto max_rank = static_cast<int>(std::min(n, m));
  int k = rank ? *rank : energy_rank(svd.singularValues());
  if (k < 1 || k > max_rank)
    throw std::invalid_argument("generate_svd_anchor: rank " + std::to_string(k) + " outside [1, " +
                                std::to_string(max_rank) + "]");
  const Matrix Vk = svd.matrixV().leftCols(k);

  RowVector sd(m);
  for (Eigen::Index c = 0; c < m; ++c)
    sd(c) = n > 1 ? std::sqrt(Xc.col(c).squaredNorm() / static_cast<double>(n - 1)) : 0.0;

  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Matrix out(rows, m);
  for (Eigen::Index r = 0; r < rows; ++r) out.row(r) = X_ij.row(pick(rng));

  // At full rank the projection is the identity; keep bootstrap rows bit-exact.
  if (k < m) out = (Matrix((out.rowwise() - mean) * Vk * Vk.transpose())).rowwise() + mean;
  if (noise_ratio > 0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < m; ++c) out(r, c) += noise_ratio * sd(c) * gauss(rng);
  }
  return out;
}

// Assembles X^anc from a c x d grid of per-party blocks. Row group i must
// have a common row count; block (i, j) must have m_j columns.
inline AnchorSet assemble_anchor(const std::vector<std::vector<Matrix>>& blocks, const PartitionedDataset& partition,
                                 AnchorMethod method) {
  const int d = partition.parties();
  if (blocks.empty()) throw std::invalid_argument("assemble_anchor: no blocks");
  AnchorSet a;
  a.method = method;
  a.col_offsets = partition.col_offsets;
  a.row_offsets = {0};
  std::vector<Matrix> row_groups;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (static_cast<int>(blocks[i].size()) != d)
      throw std::invalid_argument("assemble_anchor: row group " + std::to_string(i) + " has " +
                                  std::to_string(blocks[i].size()) + " blocks, expected " + std::to_string(d));
    const auto r_i = blocks[i][0].rows();
    for (int j = 0; j < d; ++j) {
      const auto& b = blocks[i][static_cast<std::size_t>(j)];
      if (b.rows() != r_i)
        throw std::invalid_argument("assemble_anchor: block (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") has " + std::to_string(b.rows()) + " rows, expected " + std::to_string(r_i));
      if (b.cols() != partition.cols(j))
        throw std::invalid_argument("assemble_anchor: block (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") has " + std::to_string(b.cols()) + " columns, expected " +
                                    std::to_string(partition.cols(j)));
    }
    row_groups.push_back(hstack(std::span<const Matrix>(blocks[i])));
    a.row_offsets.push_back(a.row_offsets.back() + static_cast<int>(r_i));
    a.row_provenance.insert(a.row_provenance.end(), static_cast<std::size_t>(r_i), static_cast<int>(i));
  }
  a.X = vstack(row_groups);
  if (!a.X.allFinite()) throw std::invalid_argument("assemble_anchor: non-finite anchor entry");
  return a;
}

struct AnchorOptions {
  AnchorMethod method = AnchorMethod::SvdPerturb;
  int r = 2500;  // total budget; each institution contributes ceil(r / c) rows
  double noise_ratio = 0.1;
  std::optional<int> rank;  // nullopt: 95% energy rank
  bool separate_interp = false;
};

inline int anchor_rows_per_institution(int r, int c) { return (r + c - 1) / c; }

namespace detail {

inline constexpr std::uint64_t kAlignmentAnchorStream = 0xA1;
inline constexpr std::uint64_t kInterpAnchorStream = 0xA2;

// One generation pass: party (i, j) sees only X_{i,j} and its own stream.
inline std::vector<std::vector<Matrix>> anchor_blocks(const PartitionedDataset& p, const AnchorOptions& opt,
                                                      std::uint64_t seed, std::uint64_t purpose) {
  const int rows = anchor_rows_per_institution(opt.r, p.institutions());
  std::vector<std::vector<Matrix>> grid(static_cast<std::size_t>(p.institutions()));
  for (int i = 0; i < p.institutions(); ++i) {
    for (int j = 0; j < p.parties(); ++j) {
      Rng rng = make_stream(seed, {purpose, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
      const Matrix& x = p.block(i, j);
      if (opt.method == AnchorMethod::UniformRandom) {
        grid[i].push_back(generate_uniform_anchor(x.colwise().minCoeff().transpose(),
                                                  x.colwise().maxCoeff().transpose(), rows, rng));
      } else {
        std::optional<int> rank = opt.rank;
        if (rank) *rank = std::min<int>(*rank, static_cast<int>(std::min(x.rows(), x.cols())));
        grid[i].push_back(generate_svd_anchor(x, rows, rank, opt.noise_ratio, rng));
      }
    }
  }
  return grid;
}

}  // namespace detail

// Runs every party's generator (Algorithm line 1) and assembles the result
// (line 2). Party streams are keyed by (i, j), so order of evaluation is
// irrelevant to the output.
inline AnchorSet build_anchor(const PartitionedDataset& p, const AnchorOptions& opt, std::uint64_t seed) {
  if (opt.r < 1) throw std::invalid_argument("anchor: r must be >= 1");
  AnchorSet a = assemble_anchor(detail::anchor_blocks(p, opt, seed, detail::kAlignmentAnchorStream), p, opt.method);
  if (opt.separate_interp)
    a.interp = assemble_anchor(detail::anchor_blocks(p, opt, seed, detail::kInterpAnchorStream), p, opt.method).X;
  return a;
}

// CSV with the partition's feature columns followed by an `institution`
// provenance column.
inline void write_anchor_csv(const std::string& path, const AnchorSet& a,
                             const std::vector<std::string>& feature_names) {
  std::ofstream out(path);
  if (!out) throw Error("write_anchor_csv: cannot write '" + path + "'");
  for (const auto& n : feature_names) out << n << ',';
  out << "institution\n";
  for (Eigen::Index r = 0; r < a.X.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.X.cols(); ++c) out << format_real(a.X(r, c)) << ',';
    out << a.row_provenance[static_cast<std::size_t>(r)] << '\n';
  }
}

inline AnchorSet read_anchor_csv(const std::string& path, const PartitionedDataset& partition, AnchorMethod method) {
  std::ifstream in(path);
  if (!in) throw Error("read_anchor_csv: cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  const auto header = detail::split_csv_line(line);
  if (header.empty() || header.back() != "institution" ||
      static_cast<int>(header.size()) != partition.total_cols() + 1)
    throw Error("read_anchor_csv: header does not match the partition's " + std::to_string(partition.total_cols()) +
                " features plus 'institution'");
  std::vector<std::vector<std::vector<double>>> groups;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) throw Error("read_anchor_csv: line " + std::to_string(line_no) + " is ragged");
    const auto inst = detail::parse_real(cells.back());
    if (!inst || *inst < 0 || *inst != std::floor(*inst))
      throw Error("read_anchor_csv: line " + std::to_string(line_no) + ": bad institution index");
    const auto i = static_cast<std::size_t>(*inst);
    if (i >= groups.size()) groups.resize(i + 1);
    std::vector<double> row;
    for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
      auto v = detail::parse_real(cells[c]);
      if (!v) throw Error("read_anchor_csv: line " + std::to_string(line_no) + ", column '" + header[c] + "' not numeric");
      row.push_back(*v);
    }
    groups[i].push_back(std::move(row));
  }
  std::vector<std::vector<Matrix>> blocks(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    Matrix g(static_cast<Eigen::Index>(groups[i].size()), partition.total_cols());
    for (std::size_t r = 0; r < groups[i].size(); ++r)
      for (std::size_t c = 0; c < groups[i][r].size(); ++c)
        g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = groups[i][r][c];
    for (int j = 0; j < partition.parties(); ++j)
      blocks[i].push_back(g.middleCols(partition.col_offsets[j], partition.cols(j)));
  }
  return assemble_anchor(blocks, partition, method);
}

}  // namespace icda

#endif  // ICDA_ANCHOR_HPP_
