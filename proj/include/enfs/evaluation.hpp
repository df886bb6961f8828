#pragma once

#include "enfs/config.hpp"

namespace enfs {

struct CvScore {
  double mean = 0.0;
  double stdev = 0.0;  // population standard deviation over the folds
  bool skipped = false;
};

// Mean and spread of the F1 score over stratified folds of the training data.
// An empty feature set is reported as skipped, not an error, so trajectory
// scoring can show gaps where a heuristic produced no candidate.
CvScore cross_val_score(const Dataset& train, const FeatureSet& features,
                        const LearnerConfig& learner, int folds, uint64_t seed);

struct EvalOutcome {
  bool skipped = false;
  Metrics metrics;
};

// Train on the training set, score on the held-out test set, with wall-clock
// training and scoring times recorded in the metrics.
EvalOutcome evaluate_candidate(const Dataset& train, const Dataset& test,
                               const FeatureSet& features,
                               const LearnerConfig& learner, uint64_t seed);

// Datasets after loading/generation, one-hot encoding, and normalization.
struct PreparedData {
  Dataset train;
  Dataset test;
  FeatureSet onehot_block;
  std::vector<std::string> dropped_zero_variance;
  std::vector<std::string> excluded_columns;
};

PreparedData prepare_datasets(const RunConfig& config);

// One selector applied to the round-1 kept set. The trace seed derives from
// the master seed and the selector name, so a trace computed in isolation is
// identical to its slot in run_traces.
EliminationTrace run_one_trace(const Dataset& train, const FeatureSet& kept,
                               SelectorKind kind, const RunConfig& config);

// The selector roster applied to the round-1 kept set, in roster order.
std::vector<EliminationTrace> run_traces(const Dataset& train, const FeatureSet& kept,
                                         const RunConfig& config);

std::vector<EnsembleTrajectory> build_trajectories(
    const std::vector<EliminationTrace>& traces, const RunConfig& config);

struct CvCurvePoint {
  std::string selector;
  int iteration = 0;
  CvScore score;
};

struct CandidateEvaluation {
  std::string heuristic;  // "baseline" for the full-feature-set rows
  int iteration = 0;      // -1 for baselines
  std::string learner;
  FeatureSet candidate;   // before one-hot augmentation
  int evaluated_size = 0; // feature count actually trained on
  EvalOutcome outcome;
};

struct EvaluationReport {
  RunConfig config;
  std::string train_provenance;
  std::string test_provenance;
  uint64_t train_fingerprint = 0;
  uint64_t test_fingerprint = 0;
  std::vector<std::string> column_names;  // prepared train layout, by id
  std::vector<std::string> dropped_zero_variance;
  std::vector<std::string> excluded_columns;
  CorrelationReport prefilter;
  FeatureSet onehot_block;
  std::vector<EliminationTrace> traces;
  std::vector<EnsembleTrajectory> trajectories;
  std::vector<CvCurvePoint> cv_curves;
  std::vector<CandidateEvaluation> evaluations;
  std::vector<CandidateEvaluation> baselines;
  // Which dataset each pipeline stage read, recorded as "stage:provenance".
  // Selection and CV stages must only ever list the training set here.
  std::vector<std::string> stage_inputs;
};

// Assembles the final report from already-computed stage outputs, then runs
// the two scoring stages (CV curves and train/test evaluation). Shared by the
// monolithic run and the staged CLI so both produce identical reports.
EvaluationReport finish_experiment(const RunConfig& config, const PreparedData& prepared,
                                   const CorrelationReport& prefilter,
                                   const std::vector<EliminationTrace>& traces,
                                   const std::vector<EnsembleTrajectory>& trajectories);

// The whole two-round pipeline: prepare, prefilter, trace, combine, score.
// Errors are rethrown with the failing stage's name prefixed.
EvaluationReport run_experiment(const RunConfig& config);

// Stage-name error tagging used by run_experiment and the CLI subcommands.
// Rethrows with "[stage] " prefixed, preserving the exception type for the
// exit-code mapping.
[[noreturn]] void rethrow_stage_error(const char* stage);

struct TimingRow {
  int feature_count = 0;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
};

// All timed evaluations sorted by descending feature count.
std::vector<TimingRow> timing_curve(const EvaluationReport& report);

}  // namespace enfs
