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

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "icda/config.hpp"
#include "icda/experiment.hpp"
#include "test_util.hpp"

namespace icda {
namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string config_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Small, fast synthetic run.
ExperimentConfig tiny(const fs::path& out, int trials) {
  ExperimentConfig c;
  c.data.synthetic.n = 120;
  c.data.synthetic.test_n = 40;
  c.anchor.r = 200;
  c.trials = trials;
  c.seed = 11;
  c.output = out.string();
  return c;
}

TEST(Config, DefaultsMatchTheArtificialExperiment) {
  const auto c = parse("");
  EXPECT_EQ(c.data.source, DataSource::Synthetic);
  EXPECT_EQ(c.data.synthetic.n, 1600);
  EXPECT_EQ(c.data.institutions, 2);
  EXPECT_EQ(c.data.parties, 2);
  EXPECT_EQ(c.pipeline.reduction.kind, MapKind::Lpp);
  EXPECT_EQ(c.pipeline.reduction.target_dim, 4);
  EXPECT_EQ(c.anchor.r, 2500);
  EXPECT_EQ(c.anchor.method, AnchorMethod::SvdPerturb);
  EXPECT_EQ(c.pipeline.solver, AlignmentSolver::Tls);
  EXPECT_DOUBLE_EQ(c.pipeline.learner.lambda, 0.01);
  EXPECT_FALSE(c.pipeline.learner.gamma.has_value());
  EXPECT_EQ(c.pipeline.tree.max_depth, 10);
  EXPECT_EQ(c.pipeline.tree.min_leaf, 5);
  EXPECT_EQ(c.trials, 10);
  EXPECT_EQ(to_ini(c), to_ini(artificial_preset()));
}

TEST(Config, ParsesEverySection) {
  const auto c = parse(
      "[data]\nsource = csv\ntrain = a.csv\ntest = b.csv\nlabel_column = y\ninstitutions = 3\nparties = 2\n"
      "row_cuts = 10, 20\ncol_cuts = 4\n"
      "[reduction]\nkind = pca\ntarget_dim = 2\nper_party = 1,2; 2,1; 1,1\nknn = 5\nheat_t = 0.5\nzscore = true\n"
      "[anchor]\nmethod = uniform\nrows = 90\nnoise_ratio = 0.2\nrank = 3\nseparate_interp = true\n"
      "[collaboration]\nsolver = ls\ncenter = true\n"
      "[learner]\nlambda = 0.1\ngamma = 2.5\ngamma_sample_cap = 300\n"
      "[tree]\nmax_depth = unlimited\nmin_leaf = 2\nmin_impurity_decrease = 0\n"
      "[run]\ntrials = 3\nseed = 42\noutput = out/x\nfolds = 4\n");
  EXPECT_EQ(c.data.source, DataSource::Csv);
  EXPECT_EQ(c.data.label_column, "y");
  EXPECT_EQ(c.data.row_cuts, (std::vector<int>{10, 20}));
  EXPECT_EQ(c.data.col_cuts, (std::vector<int>{4}));
  EXPECT_EQ(c.pipeline.reduction.per_party, (std::vector<std::vector<int>>{{1, 2}, {2, 1}, {1, 1}}));
  EXPECT_EQ(c.pipeline.reduction.dim(0, 1), 2);
  EXPECT_EQ(c.pipeline.reduction.lpp.knn, 5);
  EXPECT_DOUBLE_EQ(*c.pipeline.reduction.lpp.heat_t, 0.5);
  EXPECT_TRUE(c.pipeline.reduction.lpp.zscore);
  EXPECT_EQ(c.anchor.method, AnchorMethod::UniformRandom);
  EXPECT_EQ(*c.anchor.rank, 3);
  EXPECT_TRUE(c.anchor.separate_interp);
  EXPECT_EQ(c.pipeline.solver, AlignmentSolver::Ls);
  EXPECT_TRUE(c.pipeline.target.center);
  EXPECT_DOUBLE_EQ(*c.pipeline.learner.gamma, 2.5);
  EXPECT_EQ(c.pipeline.tree.max_depth, kUnlimitedDepth);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.pipeline.seed, 42u);
  EXPECT_EQ(c.output, "out/x");
  EXPECT_EQ(c.folds, 4);
}

TEST(Config, ToIniRoundTrips) {
  const std::string text =
      "[data]\nsource = csv\ntrain = a.csv\ntest = b.csv\ninstitutions = 2\nparties = 3\ncol_cuts = 2,5\n"
      "[reduction]\nper_party = 1,2,1; 1,1,1\nheat_t = 0.25\n[anchor]\nrank = 2\n[learner]\ngamma = 0.125\n"
      "[tree]\nmax_depth = unlimited\n[run]\ntrials = 1\n";
  const auto c = parse(text);
  EXPECT_EQ(to_ini(parse(to_ini(c))), to_ini(c));
  EXPECT_EQ(to_ini(parse(to_ini(artificial_preset()))), to_ini(artificial_preset()));
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(config_error("[data]\nn = 6\n").rfind("data.n:", 0), 0u);
  EXPECT_EQ(config_error("[reduction]\nkind = ica\n").rfind("reduction.kind:", 0), 0u);
  EXPECT_EQ(config_error("[learner]\nlambda = abc\n").rfind("learner.lambda:", 0), 0u);
  EXPECT_EQ(config_error("[learner]\ngamma = -1\n").rfind("learner.gamma:", 0), 0u);
  EXPECT_EQ(config_error("[anchor]\nrows = 7\n").rfind("anchor.rows:", 0), 0u);
  EXPECT_EQ(config_error("[data]\nsource = csv\n").rfind("data.train:", 0), 0u);
  EXPECT_EQ(config_error("[data]\nsource = csv\ntrain = x\ninstitutions = 3\nrow_cuts = 5\n").rfind("data.row_cuts:", 0),
            0u);
  EXPECT_EQ(config_error("[data]\ninstitutions = 3\n").rfind("data.source:", 0), 0u);
  EXPECT_EQ(config_error("[run]\ntrials = 0\n").rfind("run.trials:", 0), 0u);
  EXPECT_EQ(config_error("[tree]\nmax_depth = deep\n").rfind("tree.max_depth:", 0), 0u);
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_EQ(config_error("[learner]\nlamda = 0.1\n").rfind("learner.lamda:", 0), 0u);
  EXPECT_EQ(config_error("[extra]\nx = 1\n").rfind("extra.x:", 0), 0u);
}

TEST(Config, MalformedIni) { EXPECT_EQ(config_error("[data\nn = 4\n").rfind("config:", 0), 0u); }

TEST(Config, WidthCheckAgainstData) {
  auto c = artificial_preset();
  c.pipeline.reduction.target_dim = 10;
  c.anchor.r = 100;
  const auto data = generate_artificial({.n = 40, .test_n = 4});
  try {
    validate_against(c, data.train);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()), "reduction.target_dim: 10 must be below m_j = 10 for party (0,0)");
  }
}

TEST(Config, RelativeDataPathsFollowTheConfigFile) {
  const auto dir = testing::scratch_dir("config_paths");
  std::ofstream(dir / "c.ini") << "[data]\nsource = csv\ntrain = sub/a.csv\ntest = /abs/b.csv\n";
  const auto c = load_config((dir / "c.ini").string());
  EXPECT_EQ(fs::path(c.data.train_path), (dir / "sub/a.csv").lexically_normal());
  EXPECT_EQ(c.data.test_path, "/abs/b.csv");
  EXPECT_THROW(load_config((dir / "missing.ini").string()), ConfigError);
}

TEST(Folds, BalancedClassesSplitEvenly) {
  Labels y;
  for (int k = 0; k < 100; ++k) y.push_back(k % 2);
  const auto f = stratified_folds(y, 5, 3);
  std::map<std::pair<int, int>, int> per;
  for (std::size_t k = 0; k < y.size(); ++k) ++per[{f[k], y[k]}];
  for (int fold = 0; fold < 5; ++fold) {
    EXPECT_EQ(per[std::pair(fold, 0)], 10);
    EXPECT_EQ(per[std::pair(fold, 1)], 10);
  }
  EXPECT_EQ(stratified_folds(y, 5, 3), f);
  EXPECT_NE(stratified_folds(y, 5, 4), f);
}

TEST(Folds, UnevenClassesStayWithinOne) {
  Rng rng = make_stream(1, {});
  const Labels y = testing::random_labels(203, 3, rng);
  const auto f = stratified_folds(y, 4, 9);
  std::map<std::pair<int, int>, int> per;
  std::map<int, int> size;
  for (std::size_t k = 0; k < y.size(); ++k) {
    ++per[{f[k], y[k]}];
    ++size[f[k]];
  }
  for (int c = 0; c < 3; ++c) {
    int lo = 1 << 30, hi = 0;
    for (int fold = 0; fold < 4; ++fold) {
      lo = std::min(lo, per[std::pair(fold, c)]);
      hi = std::max(hi, per[std::pair(fold, c)]);
    }
    EXPECT_LE(hi - lo, 1);
  }
  for (const auto& [fold, n] : size) EXPECT_NEAR(n, 203.0 / 4.0, 1.0);
}

TEST(Folds, Errors) {
  EXPECT_THROW(stratified_folds({0, 1, 0, 1}, 1, 0), std::invalid_argument);
  EXPECT_THROW(stratified_folds({0, 0, 0, 1}, 2, 0), std::invalid_argument);
}

TEST(Reports, MetricsCsvLayout) {
  const std::vector<TrialKey> keys{{0, std::nullopt}, {1, std::nullopt}};
  const std::vector<TrialReport> trials{{{"CA", {1, 50, std::nullopt}}, {"CDA-analyst", {0.5, 40, 0.25}}},
                                        {{"CA", {1, 60, std::nullopt}}, {"CDA-analyst", {0.5, 40, 0.25}}}};
  const auto csv = metrics_csv(keys, trials, aggregate(trials));
  EXPECT_EQ(csv,
            "trial,method,nmi,acc,fidelity\n"
            "0,CA,1,50,\n0,CDA-analyst,0.5,40,0.25\n1,CA,1,60,\n1,CDA-analyst,0.5,40,0.25\n"
            "mean,CA,1,55,\nse,CA,0,5,\nmean,CDA-analyst,0.5,40,0.25\nse,CDA-analyst,0,0,0\n");
}

TEST(Reports, FoldColumnAndSingleTrial) {
  const std::vector<TrialKey> keys{{0, 2}};
  const std::vector<TrialReport> trials{{{"CA", {1, 50, std::nullopt}}}};
  const auto report = aggregate(trials);
  EXPECT_EQ(metrics_csv(keys, trials, report), "trial,fold,method,nmi,acc,fidelity\n0,2,CA,1,50,\nmean,,CA,1,50,\n");
  EXPECT_EQ(summary_csv(report), "method,trials,nmi_mean,acc_mean,fidelity_mean\nCA,1,1,50,\n");
  EXPECT_EQ(summary_table(report).find("+/-"), std::string::npos);
}

TEST(Reports, OutputRoot) {
  ::setenv("ICDA_OUTPUT_ROOT", "/tmp/root", 1);
  EXPECT_EQ(resolve_output("a/b"), fs::path("/tmp/root/a/b"));
  EXPECT_EQ(resolve_output("/abs"), fs::path("/abs"));
  ::unsetenv("ICDA_OUTPUT_ROOT");
  EXPECT_EQ(resolve_output("a/b"), fs::path("a/b"));
}

TEST(Commands, RunIsDeterministicAndComplete) {
  const auto base = testing::scratch_dir("cmd_run");
  const auto a = cmd_run(tiny(base / "a", 2));
  const auto b = cmd_run(tiny(base / "b", 2));
  EXPECT_EQ(a.exit_code, kExitOk);
  EXPECT_TRUE(a.audit_passed);
  EXPECT_EQ(read(base / "a/metrics.csv"), read(base / "b/metrics.csv"));
  EXPECT_EQ(read(base / "a/trial_1/cda_tree_0.json"), read(base / "b/trial_1/cda_tree_0.json"));
  for (const char* f : {"config.ini", "metrics.csv", "summary.csv", "summary.txt", "audit.txt"})
    EXPECT_TRUE(fs::exists(base / "a" / f)) << f;
  for (const char* f : {"trace.jsonl", "audit.txt", "ca.txt", "ca.dot", "cda_tree_0.json", "cda_tree_1.txt",
                        "ia_0_1.json"})
    EXPECT_TRUE(fs::exists(base / "a/trial_0" / f)) << f;
  std::vector<std::string> methods;
  for (const auto& m : a.report.methods) methods.push_back(m.method);
  EXPECT_EQ(methods, (std::vector<std::string>{"CA", "IA", "CDA-analyst", "CDA-tree"}));
  EXPECT_FALSE(a.report.find("CA")->fidelity.has_value());
  EXPECT_TRUE(a.report.find("IA")->fidelity.has_value());
  EXPECT_EQ(read(base / "a/audit.txt").rfind("PASS\n", 0), 0u);

  // The echoed config reproduces the run.
  auto echoed = load_config((base / "a/config.ini").string());
  echoed.output = (base / "c").string();
  cmd_run(echoed);
  EXPECT_EQ(read(base / "a/metrics.csv"), read(base / "c/metrics.csv"));
}

TEST(Commands, SingleTrialHasNoStandardErrors) {
  const auto base = testing::scratch_dir("cmd_run_single");
  cmd_run(tiny(base, 1));
  const auto summary = read(base / "summary.csv");
  EXPECT_EQ(summary.rfind("method,trials,nmi_mean,acc_mean,fidelity_mean\n", 0), 0u);
  EXPECT_EQ(read(base / "metrics.csv").find("\nse,"), std::string::npos);
}

TEST(Commands, Export) {
  const auto base = testing::scratch_dir("cmd_export");
  cmd_run(tiny(base, 1));
  ExportRequest req{base.string(), 1, TreeFormat::Dot, 0, std::nullopt, ""};
  const auto dot = cmd_export(req);
  EXPECT_EQ(dot, base / "trial_0/cda_tree_1.dot");
  EXPECT_EQ(read(dot).rfind("digraph tree {", 0), 0u);
  req.format = TreeFormat::IndentedText;
  req.out = (base / "t.txt").string();
  EXPECT_EQ(read(cmd_export(req)), read(base / "trial_0/cda_tree_1.txt"));
  req.institution = 5;
  try {
    cmd_export(req);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "export: no tree for institution 5 (run has 2 institutions)");
  }
  req.institution = 0;
  req.trial = 3;
  EXPECT_THROW(cmd_export(req), Error);
}

TEST(Commands, SynthMinimalAndRoundTrip) {
  const auto base = testing::scratch_dir("cmd_synth");
  SynthOptions opt;
  opt.out_dir = base.string();
  opt.data.n = 4;
  opt.data.test_n = 8;
  const auto files = cmd_synth(opt);
  const auto train = load_csv(files.train.string(), "label");
  EXPECT_EQ(train.rows(), 4);
  EXPECT_EQ(train.cols(), 20);
  EXPECT_EQ(load_csv(files.test.string(), "label").rows(), 8);
  const auto cfg = load_config(files.cuts.string());
  EXPECT_EQ(cfg.data.source, DataSource::Csv);
  EXPECT_EQ(cfg.data.row_cuts, (std::vector<int>{2}));
  EXPECT_EQ(cfg.data.col_cuts, (std::vector<int>{10}));
  EXPECT_EQ(fs::path(cfg.data.train_path), files.train.lexically_normal());

  const auto direct = generate_artificial(opt.data);
  EXPECT_TRUE(train.X == direct.train.reassemble().X);
  opt.data.n = 6;
  EXPECT_THROW(cmd_synth(opt), std::invalid_argument);
}

TEST(Commands, SynthCsvRunMatchesSyntheticData) {
  const auto base = testing::scratch_dir("cmd_synth_run");
  SynthOptions opt;
  opt.out_dir = (base / "data").string();
  opt.data.n = 120;
  opt.data.test_n = 40;
  const auto files = cmd_synth(opt);
  auto cfg = load_config(files.cuts.string());
  cfg.anchor.r = 200;
  cfg.trials = 1;
  cfg.output = (base / "run").string();
  const auto out = cmd_run(cfg);
  EXPECT_EQ(out.exit_code, kExitOk);
  EXPECT_EQ(out.report.methods.size(), 4u);
}

TEST(Commands, Crossval) {
  auto cfg = load_config(ICDA_TEST_DATA_DIR "/crossval.ini");
  const auto base = testing::scratch_dir("cmd_crossval");
  cfg.output = base.string();
  cfg.trials = 1;
  const auto out = cmd_crossval(cfg, 5);
  EXPECT_EQ(out.exit_code, kExitOk);
  ASSERT_EQ(out.keys.size(), 5u);
  EXPECT_EQ(out.keys[4].fold, 4);
  EXPECT_TRUE(fs::exists(base / "trial_0_fold_4/trace.jsonl"));
  EXPECT_EQ(read(base / "metrics.csv").rfind("trial,fold,method,", 0), 0u);
  EXPECT_EQ(out.report.find("CA")->trials, 5);
  EXPECT_GT(out.report.find("CA")->acc_percent.mean, 50.0);

  EXPECT_THROW(cmd_crossval(cfg, 1), ConfigError);
  auto with_cuts = cfg;
  with_cuts.data.row_cuts = {50};
  EXPECT_THROW(cmd_crossval(with_cuts, 5), ConfigError);
  EXPECT_THROW(cmd_crossval(tiny(base / "syn", 1), 5), ConfigError);
}

TEST(Commands, RunRejectsFullWidthIntermediates) {
  auto cfg = tiny(testing::scratch_dir("cmd_full_width"), 1);
  cfg.pipeline.reduction.target_dim = 10;
  try {
    cmd_run(cfg);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "reduction.target_dim");
  }
}

}  // namespace
}  // namespace icda
