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

// icda: synthesize data, run CA / IA / CDA comparisons, cross-validate and
// export distilled trees.
//
//   icda synth [--out DIR] [--n N] [--test-n S] [--seed K] [--noise-range R]
//   icda run (CONFIG | --preset artificial) [--trials T] [--seed K] [--output DIR]
//   icda crossval CONFIG --folds K [--trials T] [--output DIR]
//   icda export RUN_DIR --tree I --format text|dot [--trial T] [--fold F] [--out FILE]
//
// Exit codes: 0 success, 1 failure, 2 audit failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "icda/config.hpp"
#include "icda/experiment.hpp"

namespace {

struct Overrides {
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;

  void apply(icda::ExperimentConfig& cfg) const {
    if (trials) cfg.trials = *trials;
    if (seed) cfg.seed = cfg.pipeline.seed = *seed;
    if (output) cfg.output = *output;
    icda::validate(cfg);
  }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--trials", o.trials, "Number of trials (overrides run.trials)");
  cmd->add_option("--seed", o.seed, "Base seed; trial t uses seed + t (overrides run.seed)");
  cmd->add_option("--output", o.output, "Run directory (overrides run.output)");
}

void report(const icda::RunOutcome& out) {
  std::cout << icda::summary_table(out.report);
  std::cout << "audit: " << (out.audit_passed ? "PASS" : "FAIL") << "\n";
  std::cout << "wrote " << out.dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpretable collaborative data analysis on distributed data"};
  app.require_subcommand(1);

  icda::SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write the artificial train/test CSVs and a cuts file");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->capture_default_str();
  synth_cmd->add_option("--n", synth.data.n, "Training rows (multiple of 4)")->capture_default_str();
  synth_cmd->add_option("--test-n", synth.data.test_n, "Test rows")->capture_default_str();
  synth_cmd->add_option("--seed", synth.data.seed, "Seed")->capture_default_str();
  synth_cmd->add_option("--noise-range", synth.data.noise_range, "Half-width of the uniform noise features")
      ->capture_default_str();
  synth_cmd->add_option("--blob-std", synth.data.blob_std, "Standard deviation of the signal blobs")
      ->capture_default_str();

  std::string run_config, preset;
  Overrides run_over;
  auto* run_cmd = app.add_subcommand("run", "Run CA, IA and CDA for every trial");
  auto* run_cfg_opt = run_cmd->add_option("config", run_config, "INI config file")->check(CLI::ExistingFile);
  run_cmd->add_option("--preset", preset, "Built-in configuration")
      ->check(CLI::IsMember({"artificial"}))
      ->excludes(run_cfg_opt);
  add_overrides(run_cmd, run_over);

  std::string cv_config;
  int folds = 0;
  Overrides cv_over;
  auto* cv_cmd = app.add_subcommand("crossval", "Stratified k-fold cross-validation on CSV data");
  cv_cmd->add_option("config", cv_config, "INI config file")->required()->check(CLI::ExistingFile);
  cv_cmd->add_option("--folds", folds, "Number of folds (>= 2)")->required();
  add_overrides(cv_cmd, cv_over);

  icda::ExportRequest ex;
  std::string format = "text";
  std::optional<int> fold;
  auto* ex_cmd = app.add_subcommand("export", "Render a distilled tree from a run directory");
  ex_cmd->add_option("run_dir", ex.run_dir, "Run directory")->required();
  ex_cmd->add_option("--tree", ex.institution, "Institution index")->required();
  ex_cmd->add_option("--format", format, "text or dot")->check(CLI::IsMember({"text", "dot"}))->capture_default_str();
  ex_cmd->add_option("--trial", ex.trial, "Trial index")->capture_default_str();
  ex_cmd->add_option("--fold", fold, "Fold index (crossval runs)");
  ex_cmd->add_option("--out", ex.out, "Output file (default: next to the stored tree)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) {
      const auto files = icda::cmd_synth(synth);
      std::cout << "wrote " << files.train.string() << ", " << files.test.string() << ", " << files.cuts.string()
                << "\n";
      return icda::kExitOk;
    }
    if (*run_cmd) {
      if (run_config.empty() && preset.empty()) {
        std::cerr << "run: give a config file or --preset artificial\n";
        return icda::kExitFailure;
      }
      icda::ExperimentConfig cfg = preset.empty() ? icda::load_config(run_config) : icda::artificial_preset();
      run_over.apply(cfg);
      const auto out = icda::cmd_run(cfg);
      report(out);
      return out.exit_code;
    }
    if (*cv_cmd) {
      icda::ExperimentConfig cfg = icda::load_config(cv_config);
      cv_over.apply(cfg);
      const auto out = icda::cmd_crossval(cfg, folds);
      report(out);
      return out.exit_code;
    }
    if (*ex_cmd) {
      ex.format = format == "dot" ? icda::TreeFormat::Dot : icda::TreeFormat::IndentedText;
      ex.fold = fold;
      std::cout << "wrote " << icda::cmd_export(ex).string() << "\n";
      return icda::kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return icda::kExitFailure;
  }
  return icda::kExitFailure;
}
