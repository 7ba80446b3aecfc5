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

// Labeled data, c x d block partitions, CSV ingestion and the synthetic
// two-institution problem.

#ifndef ICDA_DATASET_HPP_
#define ICDA_DATASET_HPP_

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "icda/core.hpp"

namespace icda {

struct LabeledDataset {
  Matrix X;
  Labels labels;
  int class_count = 0;
  std::vector<std::string> feature_names;
  // Original label text per encoded class, in first-appearance order.
  std::vector<std::string> class_names;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index cols() const { return X.cols(); }

  // Throws std::invalid_argument describing the first broken invariant.
  void validate() const {
    if (static_cast<Eigen::Index>(labels.size()) != X.rows())
      throw std::invalid_argument("dataset: label count " + std::to_string(labels.size()) +
                                  " does not match row count " + std::to_string(X.rows()));
    if (class_count < 2) throw std::invalid_argument("dataset: at least two classes are required");
    for (int y : labels)
      if (y < 0 || y >= class_count)
        throw std::invalid_argument("dataset: label " + std::to_string(y) + " outside [0, " +
                                    std::to_string(class_count) + ")");
    if (!X.allFinite()) throw std::invalid_argument("dataset: non-finite entry in X");
    if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != X.cols())
      throw std::invalid_argument("dataset: feature name count does not match column count");
  }
};

inline std::vector<std::string> default_feature_names(Eigen::Index m) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k < m; ++k) names.push_back("x" + std::to_string(k + 1));
  return names;
}

// One-hot ground truth: row a has a single 1 in column labels[a].
struct GroundTruth {
  Matrix Y;
};

inline GroundTruth one_hot(std::span<const int> labels, int class_count) {
  if (class_count < 1) throw std::invalid_argument("one_hot: class count must be positive");
  GroundTruth gt{Matrix::Zero(static_cast<Eigen::Index>(labels.size()), class_count)};
  for (std::size_t a = 0; a < labels.size(); ++a) {
    if (labels[a] < 0 || labels[a] >= class_count)
      throw std::invalid_argument("one_hot: label " + std::to_string(labels[a]) + " at row " +
                                  std::to_string(a) + " outside [0, " + std::to_string(class_count) +
                                  ")");
    gt.Y(static_cast<Eigen::Index>(a), labels[a]) = 1.0;
  }
  return gt;
}

// The c x d grid of private blocks X_{i,j} (n_i x m_j) plus the per-institution
// label vectors. Offsets are cumulative: row_offsets has c + 1 entries and
// col_offsets has d + 1 entries, both starting at 0.
struct PartitionedDataset {
  std::vector<std::vector<Matrix>> blocks;
  std::vector<Labels> labels;
  std::vector<int> row_offsets;
  std::vector<int> col_offsets;
  int class_count = 0;
  std::vector<std::string> feature_names;

  // Optional held-out data split with the same boundaries (s_i x m_j blocks).
  std::vector<std::vector<Matrix>> test_blocks;
  std::vector<Labels> test_labels;

  int institutions() const { return static_cast<int>(blocks.size()); }
  int parties() const { return blocks.empty() ? 0 : static_cast<int>(blocks.front().size()); }
  int rows(int i) const { return row_offsets[i + 1] - row_offsets[i]; }
  int cols(int j) const { return col_offsets[j + 1] - col_offsets[j]; }
  int total_rows() const { return row_offsets.back(); }
  int total_cols() const { return col_offsets.back(); }
  bool has_test() const { return !test_blocks.empty(); }

  const Matrix& block(int i, int j) const { return blocks[i][j]; }

  // X_i = [X_{i,1}, ..., X_{i,d}].
  Matrix institution_rows(int i) const { return hstack(std::span<const Matrix>(blocks[i])); }
  Matrix institution_test_rows(int i) const { return hstack(std::span<const Matrix>(test_blocks[i])); }

  std::vector<std::string> party_feature_names(int j) const {
    return {feature_names.begin() + col_offsets[j], feature_names.begin() + col_offsets[j + 1]};
  }

  LabeledDataset reassemble() const {
    std::vector<Matrix> rows_of;
    Labels all;
    for (int i = 0; i < institutions(); ++i) {
      rows_of.push_back(institution_rows(i));
      all.insert(all.end(), labels[i].begin(), labels[i].end());
    }
    return {vstack(rows_of), std::move(all), class_count, feature_names, {}};
  }

  LabeledDataset reassemble_test() const {
    std::vector<Matrix> rows_of;
    Labels all;
    for (int i = 0; i < institutions(); ++i) {
      rows_of.push_back(institution_test_rows(i));
      all.insert(all.end(), test_labels[i].begin(), test_labels[i].end());
    }
    return {vstack(rows_of), std::move(all), class_count, feature_names, {}};
  }
};

namespace detail {

inline std::vector<int> offsets_from_cuts(std::span<const int> cuts, Eigen::Index extent,
                                          const char* what) {
  std::vector<int> offsets{0};
  for (int cut : cuts) {
    if (cut <= offsets.back() || cut >= extent)
      throw std::invalid_argument(std::string("partition: ") + what + " cuts must be strictly increasing within (0, " +
                                  std::to_string(extent) + "), got " + std::to_string(cut));
    offsets.push_back(cut);
  }
  offsets.push_back(static_cast<int>(extent));
  return offsets;
}

inline std::vector<std::vector<Matrix>> split_blocks(const Matrix& X, const std::vector<int>& row_offsets,
                                                     const std::vector<int>& col_offsets) {
  std::vector<std::vector<Matrix>> grid(row_offsets.size() - 1);
  for (std::size_t i = 0; i + 1 < row_offsets.size(); ++i) {
    for (std::size_t j = 0; j + 1 < col_offsets.size(); ++j) {
      grid[i].push_back(X.block(row_offsets[i], col_offsets[j], row_offsets[i + 1] - row_offsets[i],
                                col_offsets[j + 1] - col_offsets[j]));
    }
  }
  return grid;
}

}  // namespace detail

inline PartitionedDataset partition(const LabeledDataset& data, std::span<const int> row_cuts,
                                    std::span<const int> col_cuts) {
  data.validate();
  PartitionedDataset p;
  p.row_offsets = detail::offsets_from_cuts(row_cuts, data.rows(), "row");
  p.col_offsets = detail::offsets_from_cuts(col_cuts, data.cols(), "column");
  p.blocks = detail::split_blocks(data.X, p.row_offsets, p.col_offsets);
  for (std::size_t i = 0; i + 1 < p.row_offsets.size(); ++i)
    p.labels.emplace_back(data.labels.begin() + p.row_offsets[i], data.labels.begin() + p.row_offsets[i + 1]);
  p.class_count = data.class_count;
  p.feature_names = data.feature_names.empty() ? default_feature_names(data.cols()) : data.feature_names;
  return p;
}

// Splits a held-out set into test blocks using the partition's column
// boundaries and the given row cuts (one fewer than the institution count).
inline void attach_test(PartitionedDataset& p, const LabeledDataset& test, std::span<const int> row_cuts) {
  if (test.cols() != p.total_cols())
    throw std::invalid_argument("attach_test: test set has " + std::to_string(test.cols()) + " columns, expected " +
                                std::to_string(p.total_cols()));
  if (static_cast<int>(row_cuts.size()) + 1 != p.institutions())
    throw std::invalid_argument("attach_test: need one row cut fewer than the institution count");
  std::vector<int> offsets{0};
  for (int cut : row_cuts) {
    if (cut < offsets.back() || cut > test.rows())
      throw std::invalid_argument("attach_test: row cuts must be nondecreasing within [0, s]");
    offsets.push_back(cut);
  }
  offsets.push_back(static_cast<int>(test.rows()));
  p.test_blocks = detail::split_blocks(test.X, offsets, p.col_offsets);
  p.test_labels.clear();
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i)
    p.test_labels.emplace_back(test.labels.begin() + offsets[i], test.labels.begin() + offsets[i + 1]);
}

// Row cuts that split `rows` into `parts` nearly equal contiguous groups.
inline std::vector<int> even_cuts(int rows, int parts) {
  std::vector<int> cuts;
  for (int k = 1; k < parts; ++k) cuts.push_back(static_cast<int>(static_cast<long long>(rows) * k / parts));
  return cuts;
}

struct ArtificialOptions {
  int n = 1600;
  std::uint64_t seed = 1;
  double blob_std = 0.3;
  double noise_range = 0.3;
  int test_n = 1000;
};

struct ArtificialData {
  PartitionedDataset train;  // c = d = 2, with test blocks split evenly by institution
  LabeledDataset test;
};

namespace detail {

inline constexpr int kArtificialFeatures = 20;
inline constexpr int kSignalA = 0;   // "feature 1"
inline constexpr int kSignalB = 10;  // "feature 11"

inline void fill_blob(Matrix& X, Eigen::Index row0, Eigen::Index count, double center_a, double center_b,
                      const ArtificialOptions& opt, Rng& rng) {
  std::uniform_real_distribution<double> noise(-opt.noise_range, opt.noise_range);
  std::normal_distribution<double> jitter(0.0, opt.blob_std);
  for (Eigen::Index r = row0; r < row0 + count; ++r) {
    for (int f = 0; f < kArtificialFeatures; ++f) X(r, f) = noise(rng);
    X(r, kSignalA) = center_a + jitter(rng);
    X(r, kSignalB) = center_b + jitter(rng);
  }
}

}  // namespace detail

// Two institutions, two vertical parties, 20 features of which only x1 and
// x11 carry class signal. Institution 0 separates the classes along x11 only
// (x1 overlaps); institution 1 separates along x1 only (x11 overlaps). Class 0
// is the (+1, +1) blob everywhere.
inline ArtificialData generate_artificial(const ArtificialOptions& opt) {
  if (opt.n <= 0 || opt.n % 4 != 0)
    throw std::invalid_argument("generate_artificial: n must be a positive multiple of 4, got " + std::to_string(opt.n));
  if (!(opt.blob_std > 0)) throw std::invalid_argument("generate_artificial: blob_std must be positive");
  if (!(opt.noise_range > 0)) throw std::invalid_argument("generate_artificial: noise_range must be positive");
  if (opt.test_n < 0) throw std::invalid_argument("generate_artificial: test_n must be nonnegative");

  const int quarter = opt.n / 4;
  Rng rng = make_stream(opt.seed, {0xA127});

  LabeledDataset full;
  full.X.resize(opt.n, detail::kArtificialFeatures);
  full.labels.assign(static_cast<std::size_t>(opt.n), 0);
  full.class_count = 2;
  full.feature_names = default_feature_names(detail::kArtificialFeatures);
  full.class_names = {"0", "1"};
  detail::fill_blob(full.X, 0 * quarter, quarter, +1, +1, opt, rng);
  detail::fill_blob(full.X, 1 * quarter, quarter, +1, -1, opt, rng);
  detail::fill_blob(full.X, 2 * quarter, quarter, +1, +1, opt, rng);
  detail::fill_blob(full.X, 3 * quarter, quarter, -1, +1, opt, rng);
  std::fill(full.labels.begin() + quarter, full.labels.begin() + 2 * quarter, 1);
  std::fill(full.labels.begin() + 3 * quarter, full.labels.end(), 1);

  ArtificialData out;
  const int row_cut[] = {opt.n / 2};
  const int col_cut[] = {detail::kArtificialFeatures / 2};
  out.train = partition(full, row_cut, col_cut);

  const int class1 = opt.test_n / 2;
  const int class0 = opt.test_n - class1;
  const int blob_b = class1 - class1 / 2;
  out.test.X.resize(opt.test_n, detail::kArtificialFeatures);
  out.test.labels.assign(static_cast<std::size_t>(opt.test_n), 1);
  std::fill(out.test.labels.begin(), out.test.labels.begin() + class0, 0);
  out.test.class_count = 2;
  out.test.feature_names = full.feature_names;
  out.test.class_names = full.class_names;
  detail::fill_blob(out.test.X, 0, class0, +1, +1, opt, rng);
  detail::fill_blob(out.test.X, class0, blob_b, +1, -1, opt, rng);
  detail::fill_blob(out.test.X, class0 + blob_b, class1 / 2, -1, +1, opt, rng);

  const int test_cut[] = {opt.test_n / 2};
  attach_test(out.train, out.test, test_cut);
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    auto cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    auto b = cell.find_first_not_of(" \t");
    auto e = cell.find_last_not_of(" \t");
    cells.emplace_back(b == std::string_view::npos ? std::string_view{} : cell.substr(b, e - b + 1));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

// Reads a header-first, comma-separated file. Every column except
// `label_column` must be numeric; labels are encoded densely in order of
// first appearance.
inline LabeledDataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw Error("load_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error("load_csv: '" + path + "' is empty (header row required)");
  const auto header = detail::split_csv_line(line);
  auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) throw Error("load_csv: no column named '" + label_column + "' in '" + path + "'");
  const auto label_idx = static_cast<std::size_t>(label_it - header.begin());

  LabeledDataset ds;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_idx) ds.feature_names.push_back(header[c]);

  std::map<std::string, int> codes;
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw Error("load_csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                  " cells, header has " + std::to_string(header.size()));
    std::vector<double> values;
    values.reserve(header.size() - 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_idx) continue;
      auto v = detail::parse_real(cells[c]);
      if (!v)
        throw Error("load_csv: line " + std::to_string(line_no) + ", column '" + header[c] +
                    "': expected a finite number, got '" + cells[c] + "'");
      values.push_back(*v);
    }
    const auto& label = cells[label_idx];
    auto [it, inserted] = codes.emplace(label, static_cast<int>(ds.class_names.size()));
    if (inserted) ds.class_names.push_back(label);
    ds.labels.push_back(it->second);
    rows.push_back(std::move(values));
  }
  ds.class_count = static_cast<int>(ds.class_names.size());
  if (ds.class_count < 2)
    throw Error("load_csv: '" + path + "' has " + std::to_string(ds.class_count) + " class(es); at least 2 required");
  ds.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ds.feature_names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      ds.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return ds;
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes features followed by a `label` column holding class names (or
// integer codes when no names are recorded).
inline void write_csv(const std::string& path, const LabeledDataset& ds, const std::string& label_column = "label") {
  std::ofstream out(path);
  if (!out) throw Error("write_csv: cannot write '" + path + "'");
  const auto names = ds.feature_names.empty() ? default_feature_names(ds.cols()) : ds.feature_names;
  for (const auto& n : names) out << n << ',';
  out << label_column << '\n';
  for (Eigen::Index r = 0; r < ds.rows(); ++r) {
    for (Eigen::Index c = 0; c < ds.cols(); ++c) out << format_real(ds.X(r, c)) << ',';
    const int y = ds.labels[static_cast<std::size_t>(r)];
    out << (static_cast<std::size_t>(y) < ds.class_names.size() ? ds.class_names[y] : std::to_string(y)) << '\n';
  }
  if (!out) throw Error("write_csv: failed writing '" + path + "'");
}

}  // namespace icda

#endif  // ICDA_DATASET_HPP_
