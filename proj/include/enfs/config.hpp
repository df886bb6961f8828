#pragma once

#include "enfs/ensemble.hpp"

namespace enfs {

// Full description of one experiment run. Parsed from a plain-text config of
// "key = value" lines; every field has a default except the master seed.
struct RunConfig {
  // data.source is "synth" or "csv".
  std::string source = "synth";
  std::string train_csv;
  std::string test_csv;
  std::string schema_path;
  std::string label_column = "label";
  SynthParams synth;  // synth.seed is derived from the master seed at run time

  double prefilter_threshold = 0.9;

  std::vector<SelectorKind> selectors = {SelectorKind::Rfe, SelectorKind::Sbs,
                                         SelectorKind::Univariate,
                                         SelectorKind::Importance};
  std::vector<HeuristicKind> heuristics = {HeuristicKind::Union,
                                           HeuristicKind::Intersection,
                                           HeuristicKind::Quorum};
  int quorum_threshold = 0;  // 0 = strict majority of the selector roster

  std::vector<LearnerConfig::Kind> learners = {LearnerConfig::Kind::LogReg,
                                               LearnerConfig::Kind::Forest};
  LogRegConfig logreg;   // lr.* keys; also drives RFE's ranking model
  ForestConfig forest;   // rf.* keys; also drives the importance selector
  SbsConfig sbs;         // sbs.* keys

  std::string cv_learner = "rf";
  int cv_folds = 5;
  int cv_trees = 0;  // 0 = rf.trees; smaller values speed up the CV curves

  bool onehot_augment = false;

  // Default output directory for the run/evaluate subcommands; --out wins.
  // Like jobs, this is invocation detail and stays out of the manifest echo.
  std::string out_dir;

  uint64_t seed = 0;
  bool seed_set = false;

  // Re-run knob: varies the data sub-seed so repeated runs draw fresh
  // train/test pairs. 0 is the canonical run.
  int repeat_index = 0;

  // Execution detail, never part of the run identity or the manifest.
  int jobs = 1;

  LearnerConfig make_learner(LearnerConfig::Kind kind) const;
  LearnerConfig make_cv_learner() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Checks cross-field invariants: a seed is present, rosters are non-empty,
// the data source is complete, and numeric ranges make sense. Throws
// UsageError with the offending key.
void validate_config(const RunConfig& config);

}  // namespace enfs
