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

// Experiment configuration, read from an INI file.
//
//   [data]          source = synthetic | csv, train, test, label_column,
//                   institutions, parties, row_cuts, col_cuts,
//                   n, test_n, noise_range, blob_std
//   [reduction]     kind = lpp | pca, target_dim, per_party, knn, heat_t, zscore
//   [anchor]        method = svd | uniform, rows, noise_ratio, rank, separate_interp
//   [collaboration] solver = tls | ls, center
//   [learner]       lambda, gamma = median | <number>, gamma_sample_cap
//   [tree]          max_depth = <int> | unlimited, min_leaf, min_impurity_decrease
//   [run]           trials, seed, output, folds
//
// Lists are comma separated; per_party rows are separated by ';'.
// Every omitted key keeps the default of the artificial experiment.

#ifndef ICDA_CONFIG_HPP_
#define ICDA_CONFIG_HPP_

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "icda/anchor.hpp"
#include "icda/dataset.hpp"
#include "icda/protocol.hpp"

namespace icda {

// A configuration problem; what() starts with the offending field path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class DataSource { Synthetic, Csv };

struct DataConfig {
  DataSource source = DataSource::Synthetic;
  ArtificialOptions synthetic;
  std::string train_path;
  std::string test_path;
  std::string label_column = "label";
  int institutions = 2;
  int parties = 2;
  std::vector<int> row_cuts;  // empty: even split into `institutions`
  std::vector<int> col_cuts;  // empty: even split into `parties`
};

struct ExperimentConfig {
  DataConfig data;
  PipelineConfig pipeline;
  AnchorOptions anchor;
  int trials = 10;
  std::uint64_t seed = 1;
  std::string output = "runs/artificial";
  int folds = 5;
};

// The artificial experiment's settings.
inline ExperimentConfig artificial_preset() { return {}; }

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

class IniReader {
 public:
  explicit IniReader(const boost::property_tree::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& path) {
    seen_.insert(path);
    auto v = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(path, '.'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  template <class T>
  void read(const std::string& path, T& out) {
    auto v = raw(path);
    if (!v) return;
    if constexpr (std::is_same_v<T, std::string>) {
      out = *v;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (*v == "true" || *v == "1" || *v == "yes") out = true;
      else if (*v == "false" || *v == "0" || *v == "no") out = false;
      else throw ConfigError(path, "expected true or false, got '" + *v + "'");
    } else if constexpr (std::is_floating_point_v<T>) {
      auto d = parse_real(*v);
      if (!d) throw ConfigError(path, "expected a number, got '" + *v + "'");
      out = static_cast<T>(*d);
    } else {
      out = parse_int<T>(path, *v);
    }
  }

  std::optional<std::vector<int>> int_list(const std::string& path) {
    auto v = raw(path);
    if (!v) return std::nullopt;
    std::vector<int> out;
    if (v->empty()) return out;
    for (const auto& item : split_on(*v, ',')) out.push_back(parse_int<int>(path, item));
    return out;
  }

  template <class T>
  static T parse_int(const std::string& path, const std::string& text) {
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty())
      throw ConfigError(path, "expected an integer, got '" + text + "'");
    return value;
  }

  // Rejects keys the reader never asked for.
  void reject_unknown() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty())
        throw ConfigError(section, "key outside any section");
      for (const auto& [key, value] : body) {
        const std::string path = section + "." + key;
        if (!seen_.count(path)) throw ConfigError(path, "unknown key");
      }
    }
  }

 private:
  const boost::property_tree::ptree& tree_;
  std::set<std::string> seen_;
};

template <class E>
E parse_enum(const std::string& path, const std::string& text, const std::map<std::string, E>& names) {
  auto it = names.find(text);
  if (it != names.end()) return it->second;
  std::string options;
  for (const auto& [k, v] : names) options += (options.empty() ? "" : ", ") + k;
  throw ConfigError(path, "unknown value '" + text + "' (expected one of: " + options + ")");
}

}  // namespace detail

// Checks that need no data.
inline void validate(const ExperimentConfig& c) {
  const auto& d = c.data;
  if (d.source == DataSource::Csv && d.train_path.empty()) throw ConfigError("data.train", "required for csv data");
  if (d.institutions < 1) throw ConfigError("data.institutions", "must be >= 1");
  if (d.parties < 1) throw ConfigError("data.parties", "must be >= 1");
  if (!d.row_cuts.empty() && static_cast<int>(d.row_cuts.size()) + 1 != d.institutions)
    throw ConfigError("data.row_cuts", "needs institutions - 1 = " + std::to_string(d.institutions - 1) + " entries");
  if (!d.col_cuts.empty() && static_cast<int>(d.col_cuts.size()) + 1 != d.parties)
    throw ConfigError("data.col_cuts", "needs parties - 1 = " + std::to_string(d.parties - 1) + " entries");
  if (d.source == DataSource::Synthetic) {
    if (d.institutions != 2 || d.parties != 2)
      throw ConfigError("data.source", "synthetic data is always 2 institutions x 2 parties");
    if (d.synthetic.n < 4 || d.synthetic.n % 4 != 0) throw ConfigError("data.n", "must be a positive multiple of 4");
    if (d.synthetic.test_n < 0) throw ConfigError("data.test_n", "must be >= 0");
    if (!(d.synthetic.noise_range > 0)) throw ConfigError("data.noise_range", "must be positive");
    if (!(d.synthetic.blob_std > 0)) throw ConfigError("data.blob_std", "must be positive");
  }
  const auto& r = c.pipeline.reduction;
  if (r.target_dim < 1) throw ConfigError("reduction.target_dim", "must be >= 1");
  if (!r.per_party.empty()) {
    if (static_cast<int>(r.per_party.size()) != d.institutions)
      throw ConfigError("reduction.per_party", "needs one row per institution");
    for (const auto& row : r.per_party) {
      if (static_cast<int>(row.size()) != d.parties)
        throw ConfigError("reduction.per_party", "needs one entry per party in every row");
      for (int v : row)
        if (v < 1) throw ConfigError("reduction.per_party", "entries must be >= 1");
    }
  }
  if (r.lpp.knn < 1) throw ConfigError("reduction.knn", "must be >= 1");
  if (r.lpp.heat_t && !(*r.lpp.heat_t > 0)) throw ConfigError("reduction.heat_t", "must be positive");
  if (c.anchor.r < 1) throw ConfigError("anchor.rows", "must be >= 1");
  if (!(c.anchor.noise_ratio >= 0)) throw ConfigError("anchor.noise_ratio", "must be >= 0");
  if (c.anchor.rank && *c.anchor.rank < 1) throw ConfigError("anchor.rank", "must be >= 1");
  if (!(c.pipeline.learner.lambda >= 0)) throw ConfigError("learner.lambda", "must be >= 0");
  if (c.pipeline.learner.gamma && !(*c.pipeline.learner.gamma > 0))
    throw ConfigError("learner.gamma", "must be positive or 'median'");
  if (c.pipeline.learner.gamma_sample_cap < 2) throw ConfigError("learner.gamma_sample_cap", "must be >= 2");
  if (c.pipeline.tree.max_depth < 0) throw ConfigError("tree.max_depth", "must be >= 0");
  if (c.pipeline.tree.min_leaf < 1) throw ConfigError("tree.min_leaf", "must be >= 1");
  if (!(c.pipeline.tree.min_impurity_decrease >= 0))
    throw ConfigError("tree.min_impurity_decrease", "must be >= 0");
  if (c.trials < 1) throw ConfigError("run.trials", "must be >= 1");
  if (c.folds < 2) throw ConfigError("run.folds", "must be >= 2");
  int widest = 0;
  for (int i = 0; i < d.institutions; ++i) {
    int w = 0;
    for (int j = 0; j < d.parties; ++j) w += r.dim(i, j);
    widest = std::max(widest, w);
  }
  if (c.anchor.r < widest)
    throw ConfigError("anchor.rows", std::to_string(c.anchor.r) + " is below the widest institution intermediate (" +
                                         std::to_string(widest) + ")");
}

// Checks against the party widths m_j of the partitioned data.
inline void validate_against(const ExperimentConfig& c, const PartitionedDataset& p) {
  const auto& r = c.pipeline.reduction;
  const std::string field = r.per_party.empty() ? "reduction.target_dim" : "reduction.per_party";
  for (int i = 0; i < p.institutions(); ++i)
    for (int j = 0; j < p.parties(); ++j)
      if (r.enforce_reduction && r.dim(i, j) >= p.cols(j))
        throw ConfigError(field, std::to_string(r.dim(i, j)) + " must be below m_j = " + std::to_string(p.cols(j)) +
                                     " for party (" + std::to_string(i) + "," + std::to_string(j) + ")");
}

inline ExperimentConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  detail::IniReader ini(tree);
  ExperimentConfig c;

  auto& d = c.data;
  if (auto v = ini.raw("data.source"))
    d.source = detail::parse_enum<DataSource>("data.source", *v,
                                              {{"synthetic", DataSource::Synthetic}, {"csv", DataSource::Csv}});
  ini.read("data.train", d.train_path);
  ini.read("data.test", d.test_path);
  ini.read("data.label_column", d.label_column);
  ini.read("data.institutions", d.institutions);
  ini.read("data.parties", d.parties);
  if (auto v = ini.int_list("data.row_cuts")) d.row_cuts = *v;
  if (auto v = ini.int_list("data.col_cuts")) d.col_cuts = *v;
  ini.read("data.n", d.synthetic.n);
  ini.read("data.test_n", d.synthetic.test_n);
  ini.read("data.noise_range", d.synthetic.noise_range);
  ini.read("data.blob_std", d.synthetic.blob_std);

  auto& r = c.pipeline.reduction;
  if (auto v = ini.raw("reduction.kind"))
    r.kind = detail::parse_enum<MapKind>("reduction.kind", *v, {{"lpp", MapKind::Lpp}, {"pca", MapKind::Pca}});
  ini.read("reduction.target_dim", r.target_dim);
  if (auto v = ini.raw("reduction.per_party"); v && !v->empty()) {
    for (const auto& row : detail::split_on(*v, ';')) {
      r.per_party.emplace_back();
      for (const auto& item : detail::split_on(row, ','))
        r.per_party.back().push_back(detail::IniReader::parse_int<int>("reduction.per_party", item));
    }
  }
  ini.read("reduction.knn", r.lpp.knn);
  if (auto v = ini.raw("reduction.heat_t"); v && *v != "auto") {
    double t = 0;
    ini.read("reduction.heat_t", t);
    r.lpp.heat_t = t;
  }
  ini.read("reduction.zscore", r.lpp.zscore);

  if (auto v = ini.raw("anchor.method"))
    c.anchor.method = detail::parse_enum<AnchorMethod>(
        "anchor.method", *v, {{"svd", AnchorMethod::SvdPerturb}, {"uniform", AnchorMethod::UniformRandom}});
  ini.read("anchor.rows", c.anchor.r);
  ini.read("anchor.noise_ratio", c.anchor.noise_ratio);
  if (auto v = ini.raw("anchor.rank"); v && *v != "auto")
    c.anchor.rank = detail::IniReader::parse_int<int>("anchor.rank", *v);
  ini.read("anchor.separate_interp", c.anchor.separate_interp);

  if (auto v = ini.raw("collaboration.solver"))
    c.pipeline.solver = detail::parse_enum<AlignmentSolver>("collaboration.solver", *v,
                                                            {{"tls", AlignmentSolver::Tls}, {"ls", AlignmentSolver::Ls}});
  ini.read("collaboration.center", c.pipeline.target.center);

  ini.read("learner.lambda", c.pipeline.learner.lambda);
  if (auto v = ini.raw("learner.gamma"); v && *v != "median") {
    double g = 0;
    ini.read("learner.gamma", g);
    c.pipeline.learner.gamma = g;
  }
  ini.read("learner.gamma_sample_cap", c.pipeline.learner.gamma_sample_cap);

  if (auto v = ini.raw("tree.max_depth"); v) {
    c.pipeline.tree.max_depth =
        *v == "unlimited" ? kUnlimitedDepth : detail::IniReader::parse_int<int>("tree.max_depth", *v);
  }
  ini.read("tree.min_leaf", c.pipeline.tree.min_leaf);
  ini.read("tree.min_impurity_decrease", c.pipeline.tree.min_impurity_decrease);

  ini.read("run.trials", c.trials);
  ini.read("run.seed", c.seed);
  ini.read("run.output", c.output);
  ini.read("run.folds", c.folds);

  ini.reject_unknown();
  c.pipeline.seed = c.seed;
  validate(c);
  return c;
}

// Relative data paths are taken relative to the config file.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  ExperimentConfig c = parse_config(in);
  const auto base = std::filesystem::path(path).parent_path();
  for (std::string* p : {&c.data.train_path, &c.data.test_path})
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
  return c;
}

// Canonical INI text; parse_config(to_ini(c)) reproduces c.
inline std::string to_ini(const ExperimentConfig& c) {
  auto join = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
    return s;
  };
  std::ostringstream os;
  const auto& d = c.data;
  os << "[data]\n";
  os << "source = " << (d.source == DataSource::Csv ? "csv" : "synthetic") << '\n';
  if (d.source == DataSource::Csv) {
    os << "train = " << d.train_path << '\n';
    if (!d.test_path.empty()) os << "test = " << d.test_path << '\n';
    os << "label_column = " << d.label_column << '\n';
  } else {
    os << "n = " << d.synthetic.n << '\n';
    os << "test_n = " << d.synthetic.test_n << '\n';
    os << "noise_range = " << format_real(d.synthetic.noise_range) << '\n';
    os << "blob_std = " << format_real(d.synthetic.blob_std) << '\n';
  }
  os << "institutions = " << d.institutions << '\n';
  os << "parties = " << d.parties << '\n';
  if (!d.row_cuts.empty()) os << "row_cuts = " << join(d.row_cuts) << '\n';
  if (!d.col_cuts.empty()) os << "col_cuts = " << join(d.col_cuts) << '\n';

  const auto& r = c.pipeline.reduction;
  os << "\n[reduction]\n";
  os << "kind = " << to_string(r.kind) << '\n';
  os << "target_dim = " << r.target_dim << '\n';
  if (!r.per_party.empty()) {
    os << "per_party = ";
    for (std::size_t i = 0; i < r.per_party.size(); ++i) os << (i ? "; " : "") << join(r.per_party[i]);
    os << '\n';
  }
  os << "knn = " << r.lpp.knn << '\n';
  os << "heat_t = " << (r.lpp.heat_t ? format_real(*r.lpp.heat_t) : "auto") << '\n';
  os << "zscore = " << (r.lpp.zscore ? "true" : "false") << '\n';

  os << "\n[anchor]\n";
  os << "method = " << to_string(c.anchor.method) << '\n';
  os << "rows = " << c.anchor.r << '\n';
  os << "noise_ratio = " << format_real(c.anchor.noise_ratio) << '\n';
  os << "rank = " << (c.anchor.rank ? std::to_string(*c.anchor.rank) : "auto") << '\n';
  os << "separate_interp = " << (c.anchor.separate_interp ? "true" : "false") << '\n';

  os << "\n[collaboration]\n";
  os << "solver = " << to_string(c.pipeline.solver) << '\n';
  os << "center = " << (c.pipeline.target.center ? "true" : "false") << '\n';

  os << "\n[learner]\n";
  os << "lambda = " << format_real(c.pipeline.learner.lambda) << '\n';
  os << "gamma = " << (c.pipeline.learner.gamma ? format_real(*c.pipeline.learner.gamma) : "median") << '\n';
  os << "gamma_sample_cap = " << c.pipeline.learner.gamma_sample_cap << '\n';

  os << "\n[tree]\n";
  os << "max_depth = "
     << (c.pipeline.tree.max_depth == kUnlimitedDepth ? "unlimited" : std::to_string(c.pipeline.tree.max_depth))
     << '\n';
  os << "min_leaf = " << c.pipeline.tree.min_leaf << '\n';
  os << "min_impurity_decrease = " << format_real(c.pipeline.tree.min_impurity_decrease) << '\n';

  os << "\n[run]\n";
  os << "trials = " << c.trials << '\n';
  os << "seed = " << c.seed << '\n';
  os << "output = " << c.output << '\n';
  os << "folds = " << c.folds << '\n';
  return os.str();
}

}  // namespace icda

#endif  // ICDA_CONFIG_HPP_
