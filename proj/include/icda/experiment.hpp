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

// Experiment driver behind the command-line tool: CA / IA / CDA comparison
// trials, stratified cross-validation, and the on-disk run layout.
//
// A run directory holds
//   config.ini    effective configuration
//   metrics.csv   one row per trial (and fold) and method
//   summary.csv   mean and standard error per method
//   summary.txt   the same as an aligned table
//   audit.txt     PASS or FAIL over every trial
//   trial_<t>[_fold_<f>]/
//     trace.jsonl, audit.txt, warnings.txt,
//     ca.{txt,dot,json}, cda_tree_<i>.{txt,dot,json}, ia_<i>_<j>.{txt,json}

#ifndef ICDA_EXPERIMENT_HPP_
#define ICDA_EXPERIMENT_HPP_

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "icda/anchor.hpp"
#include "icda/config.hpp"
#include "icda/dataset.hpp"
#include "icda/distill.hpp"
#include "icda/metrics.hpp"
#include "icda/protocol.hpp"

namespace icda {

namespace fs = std::filesystem;

inline constexpr const char* kMethodCa = "CA";
inline constexpr const char* kMethodIa = "IA";
inline constexpr const char* kMethodCda = "CDA-analyst";
inline constexpr const char* kMethodCdaTree = "CDA-tree";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitAuditFailure = 2;

struct TrialResult {
  TrialReport scores;  // CA, IA (party average), CDA, CDA-tree
  std::vector<std::pair<std::string, MethodScores>> ia_parties;
  DecisionTree ca_tree;
  std::vector<std::vector<DecisionTree>> ia_trees;  // [i][j]
  TrainedCollaboration trained;
  AuditReport audit;
  Labels truth, ca_pred, cda_pred, cda_tree_pred;
};

// One CA / IA / CDA comparison on a partition that carries test blocks.
inline TrialResult run_trial(const PartitionedDataset& p, const ExperimentConfig& cfg, std::uint64_t trial_seed) {
  if (!p.has_test()) throw std::invalid_argument("run_trial: partition has no test blocks");
  validate_against(cfg, p);
  const auto& tree_params = cfg.pipeline.tree;
  PipelineConfig pipeline = cfg.pipeline;
  pipeline.seed = trial_seed;

  TrialResult r;
  const AnchorSet anchor = build_anchor(p, cfg.anchor, trial_seed);
  r.trained = run_training(p, anchor, pipeline);
  distill_users(r.trained, anchor, tree_params);
  const auto cda = predict_test(r.trained, p.test_blocks);
  r.audit = audit_trace(r.trained.trace);

  const LabeledDataset test = p.reassemble_test();
  r.truth = test.labels;
  if (r.truth.empty()) throw std::invalid_argument("run_trial: empty test set");

  auto ca = run_centralized(p.reassemble(), test.X, tree_params);
  r.ca_tree = std::move(ca.tree);
  r.ca_pred = std::move(ca.predictions);

  MethodScores ia_mean;
  ia_mean.fidelity = 0.0;
  r.ia_trees.resize(static_cast<std::size_t>(p.institutions()));
  for (int i = 0; i < p.institutions(); ++i) {
    for (int j = 0; j < p.parties(); ++j) {
      auto ia = run_individual(p.block(i, j), p.labels[i], test.X.middleCols(p.col_offsets[j], p.cols(j)),
                               tree_params, p.class_count);
      auto s = score_method(ia.predictions, r.truth, std::span<const int>(r.ca_pred));
      ia_mean.nmi += s.nmi;
      ia_mean.acc_percent += s.acc_percent;
      *ia_mean.fidelity += *s.fidelity;
      r.ia_parties.emplace_back("IA[" + std::to_string(i) + "," + std::to_string(j) + "]", s);
      r.ia_trees[i].push_back(std::move(ia.tree));
    }
  }
  const double parties = static_cast<double>(r.ia_parties.size());
  ia_mean.nmi /= parties;
  ia_mean.acc_percent /= parties;
  *ia_mean.fidelity /= parties;

  for (int i = 0; i < p.institutions(); ++i) {
    const auto& labels = cda[static_cast<std::size_t>(i)].labels;
    r.cda_pred.insert(r.cda_pred.end(), labels.begin(), labels.end());
    const auto tree_labels = predict_tree(*r.trained.trees[static_cast<std::size_t>(i)], p.institution_test_rows(i));
    r.cda_tree_pred.insert(r.cda_tree_pred.end(), tree_labels.begin(), tree_labels.end());
  }

  r.scores.emplace_back(kMethodCa, score_method(r.ca_pred, r.truth, std::nullopt));
  r.scores.emplace_back(kMethodIa, ia_mean);
  r.scores.emplace_back(kMethodCda, score_method(r.cda_pred, r.truth, std::span<const int>(r.ca_pred)));
  r.scores.emplace_back(kMethodCdaTree, score_method(r.cda_tree_pred, r.truth, std::span<const int>(r.ca_pred)));
  return r;
}

// Fold index per row. Each class is shuffled on its own stream and dealt
// round-robin, continuing where the previous class stopped, so every fold
// gets floor or ceil of its share.
inline std::vector<int> stratified_folds(const Labels& labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("stratified_folds: folds must be >= 2");
  std::map<int, std::vector<int>> by_class;
  for (std::size_t k = 0; k < labels.size(); ++k) by_class[labels[k]].push_back(static_cast<int>(k));
  for (const auto& [y, rows] : by_class)
    if (static_cast<int>(rows.size()) < folds)
      throw std::invalid_argument("stratified_folds: class " + std::to_string(y) + " has " +
                                  std::to_string(rows.size()) + " rows, fewer than " + std::to_string(folds) +
                                  " folds");
  std::vector<int> fold(labels.size(), -1);
  std::size_t dealt = 0;
  for (auto& [y, rows] : by_class) {
    Rng rng = make_stream(seed, {0xF01D, static_cast<std::uint64_t>(y)});
    std::shuffle(rows.begin(), rows.end(), rng);
    for (int row : rows) fold[static_cast<std::size_t>(row)] = static_cast<int>(dealt++ % static_cast<std::size_t>(folds));
  }
  return fold;
}

inline LabeledDataset subset(const LabeledDataset& ds, const std::vector<int>& rows) {
  LabeledDataset out{gather_rows(ds.X, rows), {}, ds.class_count, ds.feature_names, ds.class_names};
  for (int k : rows) out.labels.push_back(ds.labels[static_cast<std::size_t>(k)]);
  return out;
}

namespace detail {

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_tree(const fs::path& stem, const DecisionTree& tree, const std::vector<std::string>& names,
                       bool with_dot) {
  write_file(stem.string() + ".txt", export_tree(tree, names, TreeFormat::IndentedText));
  if (with_dot) write_file(stem.string() + ".dot", export_tree(tree, names, TreeFormat::Dot));
  write_file(stem.string() + ".json", tree_to_json(tree, names).dump(1) + "\n");
}

inline std::string optional_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace detail

inline void write_trial_artifacts(const fs::path& dir, const TrialResult& r, const PartitionedDataset& p) {
  fs::create_directories(dir);
  detail::write_file(dir / "trace.jsonl", r.trained.trace.to_jsonl());
  detail::write_file(dir / "audit.txt", r.audit.str());
  std::string warnings;
  for (const auto& w : r.trained.warnings) warnings += w + '\n';
  detail::write_file(dir / "warnings.txt", warnings);
  detail::write_tree(dir / "ca", r.ca_tree, p.feature_names, true);
  for (int i = 0; i < p.institutions(); ++i) {
    detail::write_tree(dir / ("cda_tree_" + std::to_string(i)), *r.trained.trees[static_cast<std::size_t>(i)],
                       p.feature_names, true);
    for (int j = 0; j < p.parties(); ++j)
      detail::write_tree(dir / ("ia_" + std::to_string(i) + "_" + std::to_string(j)), r.ia_trees[i][j],
                         p.party_feature_names(j), false);
  }
}

struct TrialKey {
  int trial = 0;
  std::optional<int> fold;

  std::string dir_name() const {
    return "trial_" + std::to_string(trial) + (fold ? "_fold_" + std::to_string(*fold) : "");
  }
};

// Per-trial rows, then "mean" and "se" rows per method.
inline std::string metrics_csv(const std::vector<TrialKey>& keys, const std::vector<TrialReport>& trials,
                               const MetricsReport& report) {
  const bool folds = !keys.empty() && keys.front().fold.has_value();
  std::string out = folds ? "trial,fold,method,nmi,acc,fidelity\n" : "trial,method,nmi,acc,fidelity\n";
  for (std::size_t t = 0; t < trials.size(); ++t) {
    for (const auto& [method, s] : trials[t]) {
      out += std::to_string(keys[t].trial) + ",";
      if (folds) out += std::to_string(*keys[t].fold) + ",";
      out += method + "," + format_real(s.nmi) + "," + format_real(s.acc_percent) + "," +
             detail::optional_real(s.fidelity) + "\n";
    }
  }
  const std::string pad = folds ? "," : "";
  for (const auto& m : report.methods) {
    out += "mean," + pad + m.method + "," + format_real(m.nmi.mean) + "," + format_real(m.acc_percent.mean) + "," +
           (m.fidelity ? format_real(m.fidelity->mean) : "") + "\n";
    if (m.nmi.standard_error)
      out += "se," + pad + m.method + "," + format_real(*m.nmi.standard_error) + "," +
             format_real(*m.acc_percent.standard_error) + "," +
             (m.fidelity ? format_real(*m.fidelity->standard_error) : "") + "\n";
  }
  return out;
}

// SE columns are left out when every method has a single trial.
inline std::string summary_csv(const MetricsReport& report) {
  const bool se = !report.methods.empty() && report.methods.front().trials > 1;
  std::string out = se ? "method,trials,nmi_mean,nmi_se,acc_mean,acc_se,fidelity_mean,fidelity_se\n"
                       : "method,trials,nmi_mean,acc_mean,fidelity_mean\n";
  for (const auto& m : report.methods) {
    out += m.method + "," + std::to_string(m.trials) + "," + format_real(m.nmi.mean) + ",";
    if (se) out += detail::optional_real(m.nmi.standard_error) + ",";
    out += format_real(m.acc_percent.mean) + ",";
    if (se) out += detail::optional_real(m.acc_percent.standard_error) + ",";
    out += m.fidelity ? format_real(m.fidelity->mean) : "";
    if (se) out += "," + (m.fidelity ? detail::optional_real(m.fidelity->standard_error) : std::string());
    out += "\n";
  }
  return out;
}

inline std::string summary_table(const MetricsReport& report) {
  auto cell = [](const Summary& s, int digits) {
    char buf[64];
    if (s.standard_error)
      std::snprintf(buf, sizeof buf, "%.*f +/- %.*f", digits, s.mean, digits, *s.standard_error);
    else
      std::snprintf(buf, sizeof buf, "%.*f", digits, s.mean);
    return std::string(buf);
  };
  char line[256];
  std::string out;
  std::snprintf(line, sizeof line, "%-12s %-18s %-18s %-18s\n", "method", "NMI", "ACC", "Fidelity");
  out += line;
  for (const auto& m : report.methods) {
    std::snprintf(line, sizeof line, "%-12s %-18s %-18s %-18s\n", m.method.c_str(), cell(m.nmi, 2).c_str(),
                  cell(m.acc_percent, 2).c_str(), m.fidelity ? cell(*m.fidelity, 2).c_str() : "-");
    out += line;
  }
  return out;
}

// Relative output paths land under $ICDA_OUTPUT_ROOT when it is set.
inline fs::path resolve_output(const std::string& output) {
  const fs::path p(output);
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv("ICDA_OUTPUT_ROOT"); root && *root) return fs::path(root) / p;
  return p;
}

struct RunOutcome {
  fs::path dir;
  std::vector<TrialKey> keys;
  std::vector<TrialReport> trials;
  MetricsReport report;
  bool audit_passed = true;
  int exit_code = kExitOk;
};

namespace detail {

inline RunOutcome finish_run(const fs::path& dir, const ExperimentConfig& cfg, std::vector<TrialKey> keys,
                             std::vector<TrialReport> trials, const std::vector<AuditReport>& audits) {
  RunOutcome out{dir, std::move(keys), std::move(trials), {}, true, kExitOk};
  out.report = aggregate(out.trials);
  std::string audit = "";
  for (std::size_t t = 0; t < audits.size(); ++t) {
    out.audit_passed = out.audit_passed && audits[t].passed;
    audit += out.keys[t].dir_name() + ": " + (audits[t].passed ? "PASS" : "FAIL") + "\n";
    for (const auto& v : audits[t].violations) audit += "  " + v + "\n";
  }
  audit = std::string(out.audit_passed ? "PASS" : "FAIL") + "\n" + audit;
  write_file(dir / "config.ini", to_ini(cfg));
  write_file(dir / "metrics.csv", metrics_csv(out.keys, out.trials, out.report));
  write_file(dir / "summary.csv", summary_csv(out.report));
  write_file(dir / "summary.txt", summary_table(out.report));
  write_file(dir / "audit.txt", audit);
  out.exit_code = out.audit_passed ? kExitOk : kExitAuditFailure;
  return out;
}

inline PartitionedDataset partition_csv(const LabeledDataset& train, const LabeledDataset* test,
                                        const DataConfig& d, bool use_row_cuts) {
  const auto row_cuts = use_row_cuts && !d.row_cuts.empty() ? d.row_cuts
                                                           : even_cuts(static_cast<int>(train.rows()), d.institutions);
  const auto col_cuts = d.col_cuts.empty() ? even_cuts(static_cast<int>(train.cols()), d.parties) : d.col_cuts;
  try {
    auto p = partition(train, row_cuts, col_cuts);
    if (test) attach_test(p, *test, even_cuts(static_cast<int>(test->rows()), d.institutions));
    return p;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("data", e.what());
  }
}

inline void check_classes(const LabeledDataset& train, const LabeledDataset& test) {
  if (train.cols() != test.cols())
    throw ConfigError("data.test", "has " + std::to_string(test.cols()) + " feature columns, train has " +
                                       std::to_string(train.cols()));
}

// Maps the test set's labels onto the training set's class indices.
inline LabeledDataset align_labels(const LabeledDataset& train, LabeledDataset test) {
  if (train.class_names.empty() || test.class_names.empty()) return test;
  std::vector<int> remap;
  for (const auto& name : test.class_names) {
    auto it = std::find(train.class_names.begin(), train.class_names.end(), name);
    if (it == train.class_names.end()) throw ConfigError("data.test", "label '" + name + "' does not occur in train");
    remap.push_back(static_cast<int>(it - train.class_names.begin()));
  }
  for (int& y : test.labels) y = remap[static_cast<std::size_t>(y)];
  test.class_count = train.class_count;
  test.class_names = train.class_names;
  return test;
}

}  // namespace detail

// CA, IA and CDA for every trial; trial t uses seed + t. Synthetic data is
// regenerated per trial, CSV data is fixed and only the anchors change.
inline RunOutcome cmd_run(const ExperimentConfig& cfg) {
  validate(cfg);
  const fs::path dir = resolve_output(cfg.output);
  fs::create_directories(dir);

  std::optional<PartitionedDataset> fixed;
  if (cfg.data.source == DataSource::Csv) {
    if (cfg.data.test_path.empty()) throw ConfigError("data.test", "required by run for csv data");
    const auto train = load_csv(cfg.data.train_path, cfg.data.label_column);
    const auto test = detail::align_labels(train, load_csv(cfg.data.test_path, cfg.data.label_column));
    detail::check_classes(train, test);
    fixed = detail::partition_csv(train, &test, cfg.data, true);
    validate_against(cfg, *fixed);
  } else if (cfg.data.synthetic.test_n < 1) {
    throw ConfigError("data.test_n", "run needs a test set");
  }

  std::vector<TrialKey> keys;
  std::vector<TrialReport> trials;
  std::vector<AuditReport> audits;
  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(t);
    PartitionedDataset synthetic;
    if (!fixed) {
      ArtificialOptions opt = cfg.data.synthetic;
      opt.seed = seed;
      synthetic = generate_artificial(opt).train;
      if (t == 0) validate_against(cfg, synthetic);
    }
    const PartitionedDataset& p = fixed ? *fixed : synthetic;
    auto r = run_trial(p, cfg, seed);
    TrialKey key{t, std::nullopt};
    write_trial_artifacts(dir / key.dir_name(), r, p);
    keys.push_back(key);
    trials.push_back(std::move(r.scores));
    audits.push_back(std::move(r.audit));
  }
  return detail::finish_run(dir, cfg, std::move(keys), std::move(trials), audits);
}

// Stratified k-fold over the CSV training file, repeated for every trial.
// Within a fold the training rows are split evenly into the configured
// institutions, keeping file order; the held-out rows are split the same way.
inline RunOutcome cmd_crossval(const ExperimentConfig& cfg, int folds) {
  validate(cfg);
  if (cfg.data.source != DataSource::Csv) throw ConfigError("data.source", "crossval needs csv data");
  if (folds < 2) throw ConfigError("run.folds", "must be >= 2, got " + std::to_string(folds));
  if (!cfg.data.row_cuts.empty())
    throw ConfigError("data.row_cuts", "crossval re-partitions every fold evenly; remove row_cuts");
  const fs::path dir = resolve_output(cfg.output);
  fs::create_directories(dir);
  const auto data = load_csv(cfg.data.train_path, cfg.data.label_column);

  std::vector<TrialKey> keys;
  std::vector<TrialReport> trials;
  std::vector<AuditReport> audits;
  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(t);
    std::vector<int> fold_of;
    try {
      fold_of = stratified_folds(data.labels, folds, seed);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("run.folds", e.what());
    }
    for (int f = 0; f < folds; ++f) {
      std::vector<int> train_rows, test_rows;
      for (std::size_t k = 0; k < fold_of.size(); ++k)
        (fold_of[k] == f ? test_rows : train_rows).push_back(static_cast<int>(k));
      const auto train = subset(data, train_rows);
      const auto test = subset(data, test_rows);
      const auto p = detail::partition_csv(train, &test, cfg.data, false);
      auto r = run_trial(p, cfg, seed);
      TrialKey key{t, f};
      write_trial_artifacts(dir / key.dir_name(), r, p);
      keys.push_back(key);
      trials.push_back(std::move(r.scores));
      audits.push_back(std::move(r.audit));
    }
  }
  ExperimentConfig echo = cfg;
  echo.folds = folds;
  return detail::finish_run(dir, echo, std::move(keys), std::move(trials), audits);
}

struct SynthOptions {
  std::string out_dir = "data";
  ArtificialOptions data;
};

struct SynthFiles {
  fs::path train, test, cuts;
};

// Writes train.csv, test.csv and cuts.ini; cuts.ini is a complete csv
// config for `run`.
inline SynthFiles cmd_synth(const SynthOptions& opt) {
  if (opt.data.n < 4 || opt.data.n % 4 != 0) throw std::invalid_argument("synth: n must be a positive multiple of 4");
  const auto data = generate_artificial(opt.data);
  const fs::path dir = resolve_output(opt.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("synth: cannot create '" + dir.string() + "': " + ec.message());
  SynthFiles files{dir / "train.csv", dir / "test.csv", dir / "cuts.ini"};
  write_csv(files.train.string(), data.train.reassemble());
  write_csv(files.test.string(), data.test);
  detail::write_file(files.cuts, "[data]\nsource = csv\ntrain = train.csv\ntest = test.csv\ninstitutions = 2\n"
                                 "parties = 2\nrow_cuts = " +
                                     std::to_string(opt.data.n / 2) + "\ncol_cuts = " +
                                     std::to_string(detail::kSignalB) + "\n");
  return files;
}

struct ExportRequest {
  std::string run_dir;
  int institution = 0;
  TreeFormat format = TreeFormat::IndentedText;
  int trial = 0;
  std::optional<int> fold;
  std::string out;  // empty: next to the JSON source
};

// Renders a stored CDA tree t_i. Returns the written path.
inline fs::path cmd_export(const ExportRequest& req) {
  const fs::path trial_dir = fs::path(req.run_dir) / TrialKey{req.trial, req.fold}.dir_name();
  if (!fs::is_directory(trial_dir)) throw Error("export: no run artifacts at '" + trial_dir.string() + "'");
  const fs::path src = trial_dir / ("cda_tree_" + std::to_string(req.institution) + ".json");
  if (!fs::exists(src)) {
    int count = 0;
    while (fs::exists(trial_dir / ("cda_tree_" + std::to_string(count) + ".json"))) ++count;
    throw Error("export: no tree for institution " + std::to_string(req.institution) + " (run has " +
                std::to_string(count) + " institutions)");
  }
  NamedTree named = tree_from_json(nlohmann::json::parse(detail::read_file(src)));
  const fs::path dst = req.out.empty() ? fs::path(src).replace_extension(
                                             req.format == TreeFormat::Dot ? ".dot" : ".txt")
                                       : fs::path(req.out);
  detail::write_file(dst, export_tree(named.tree, named.feature_names, req.format));
  return dst;
}

}  // namespace icda

#endif  // ICDA_EXPERIMENT_HPP_
