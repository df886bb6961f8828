#include "enfs/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace enfs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct FittedLearner {
  LearnerConfig::Kind kind = LearnerConfig::Kind::Forest;
  LogRegModel lr;
  ForestModel rf;
};

FittedLearner fit_learner(const Dataset& d, const FeatureSet& features,
                          const LearnerConfig& learner, uint64_t seed) {
  FittedLearner fitted;
  fitted.kind = learner.kind;
  if (learner.kind == LearnerConfig::Kind::LogReg) {
    LogRegConfig cfg = learner.logreg;
    cfg.seed = seed;
    fitted.lr = train_logreg(d, features, cfg);
  } else {
    ForestConfig cfg = learner.forest;
    cfg.seed = seed;
    fitted.rf = train_random_forest(d, features, cfg, 1);
  }
  return fitted;
}

std::vector<int> predict_learner(const FittedLearner& fitted, const Dataset& d,
                                 const FeatureSet& features) {
  if (fitted.kind == LearnerConfig::Kind::LogReg) {
    return predict(fitted.lr, d, features);
  }
  return predict(fitted.rf, d, features);
}

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (...) {
    rethrow_stage_error(stage);
  }
}

}  // namespace

void rethrow_stage_error(const char* stage) {
  std::string prefix = "[" + std::string(stage) + "] ";
  try {
    throw;
  } catch (const UsageError& e) {
    throw UsageError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(prefix + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(prefix + e.what());
  }
}

CvScore cross_val_score(const Dataset& train, const FeatureSet& features,
                        const LearnerConfig& learner, int folds, uint64_t seed) {
  if (features.empty()) return CvScore{0.0, 0.0, true};

  FoldPlan plan = stratified_kfold(train, folds, seed_mix(seed, "folds"));
  std::vector<double> scores(static_cast<std::size_t>(plan.k), 0.0);
  for (int f = 0; f < plan.k; ++f) {
    std::vector<int> fit_rows;
    std::vector<int> held_out;
    for (int i = 0; i < train.n_rows(); ++i) {
      if (plan.assignments[static_cast<std::size_t>(i)] == f) {
        held_out.push_back(i);
      } else {
        fit_rows.push_back(i);
      }
    }
    Dataset fit_data = train.subset_rows(fit_rows);
    Dataset held_data = train.subset_rows(held_out);
    FittedLearner fitted =
        fit_learner(fit_data, features, learner, seed_mix(seed, static_cast<uint64_t>(f)));
    std::vector<int> pred = predict_learner(fitted, held_data, features);
    scores[static_cast<std::size_t>(f)] = f1_score(confusion(held_data.labels(), pred));
  }

  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(scores.size());
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  var /= static_cast<double>(scores.size());
  return CvScore{mean, std::sqrt(var), false};
}

EvalOutcome evaluate_candidate(const Dataset& train, const Dataset& test,
                               const FeatureSet& features,
                               const LearnerConfig& learner, uint64_t seed) {
  if (features.empty()) return EvalOutcome{true, {}};

  auto t0 = Clock::now();
  FittedLearner fitted = fit_learner(train, features, learner, seed);
  double train_seconds = seconds_since(t0);

  auto t1 = Clock::now();
  std::vector<int> pred = predict_learner(fitted, test, features);
  double test_seconds = seconds_since(t1);

  EvalOutcome outcome;
  outcome.metrics = compute_metrics(confusion(test.labels(), pred));
  outcome.metrics.train_seconds = train_seconds;
  outcome.metrics.test_seconds = test_seconds;
  return outcome;
}

PreparedData prepare_datasets(const RunConfig& config) {
  if (config.source == "synth") {
    SynthParams params = config.synth;
    params.seed = seed_mix(config.seed, "synth-data");
    if (config.repeat_index > 0) {
      params.seed = seed_mix(params.seed, static_cast<uint64_t>(config.repeat_index));
    }
    SynthData data = synth_generate(params);
    Dataset train = normalize_minmax(data.train, data.train);
    Dataset test = normalize_minmax(data.train, data.test);
    return PreparedData{std::move(train), std::move(test), {}, {}, {}};
  }

  Schema schema = load_schema(config.schema_path);
  LoadResult train_load = load_csv(config.train_csv, schema, config.label_column, true);
  LoadResult test_load = load_csv(config.test_csv, schema, config.label_column, false);

  // Pin the test layout to the training layout (training may have dropped
  // zero-variance columns the test file still carries).
  std::vector<std::string> names;
  names.reserve(train_load.dataset.columns().size());
  for (const auto& c : train_load.dataset.columns()) names.push_back(c.name);
  Dataset test_aligned = test_load.dataset.select_columns(names);

  // One-hot encode with the categories observed in training data.
  std::vector<std::pair<std::string, std::vector<std::string>>> categorical;
  for (const auto& c : train_load.dataset.columns()) {
    if (c.kind == ColumnKind::Categorical) categorical.emplace_back(c.name, c.categories);
  }
  Dataset train = train_load.dataset;
  Dataset test = std::move(test_aligned);
  for (const auto& [name, cats] : categorical) {
    train = one_hot_encode(train, name, cats);
    test = one_hot_encode(test, name, cats);
  }

  Dataset train_norm = normalize_minmax(train, train);
  Dataset test_norm = normalize_minmax(train, test);
  FeatureSet block = train_norm.features_of_kind(ColumnKind::OneHot);
  return PreparedData{std::move(train_norm), std::move(test_norm), std::move(block),
                      std::move(train_load.dropped_zero_variance),
                      std::move(train_load.excluded_columns)};
}

EliminationTrace run_one_trace(const Dataset& train, const FeatureSet& kept,
                               SelectorKind kind, const RunConfig& config) {
  uint64_t seed = seed_mix(config.seed, "trace-" + selector_name(kind));
  switch (kind) {
    case SelectorKind::Univariate:
      return univariate_trace(train, kept);
    case SelectorKind::Rfe:
      return rfe_trace(train, kept, seed, config.logreg);
    case SelectorKind::Sbs:
      return sbs_trace(train, kept, seed, config.sbs, config.jobs);
    case SelectorKind::Importance:
      return importance_trace(train, kept, seed, config.forest, config.jobs);
  }
  throw std::invalid_argument("unknown selector kind");
}

std::vector<EliminationTrace> run_traces(const Dataset& train, const FeatureSet& kept,
                                         const RunConfig& config) {
  std::vector<EliminationTrace> traces;
  traces.reserve(config.selectors.size());
  for (SelectorKind kind : config.selectors) {
    traces.push_back(run_one_trace(train, kept, kind, config));
  }
  return traces;
}

std::vector<EnsembleTrajectory> build_trajectories(
    const std::vector<EliminationTrace>& traces, const RunConfig& config) {
  std::vector<EnsembleTrajectory> trajectories;
  trajectories.reserve(config.heuristics.size());
  for (HeuristicKind kind : config.heuristics) {
    Heuristic h;
    h.kind = kind;
    h.quorum_threshold = config.quorum_threshold;
    trajectories.push_back(build_trajectory(traces, h));
  }
  return trajectories;
}

EvaluationReport finish_experiment(const RunConfig& config, const PreparedData& prepared,
                                   const CorrelationReport& prefilter,
                                   const std::vector<EliminationTrace>& traces,
                                   const std::vector<EnsembleTrajectory>& trajectories) {
  EvaluationReport report;
  report.config = config;
  report.train_provenance = prepared.train.provenance();
  report.test_provenance = prepared.test.provenance();
  report.train_fingerprint = prepared.train.fingerprint();
  report.test_fingerprint = prepared.test.fingerprint();
  for (const auto& c : prepared.train.columns()) report.column_names.push_back(c.name);
  report.dropped_zero_variance = prepared.dropped_zero_variance;
  report.excluded_columns = prepared.excluded_columns;
  report.onehot_block = prepared.onehot_block;
  report.prefilter = prefilter;
  report.traces = traces;
  report.trajectories = trajectories;
  report.stage_inputs.push_back("prefilter:" + prepared.train.provenance());
  report.stage_inputs.push_back("trace:" + prepared.train.provenance());

  run_stage("cv", [&] {
    const LearnerConfig cv_learner = config.make_cv_learner();
    int m = report.prefilter.kept.size();
    std::size_t tasks = report.traces.size() * static_cast<std::size_t>(m);
    report.cv_curves.resize(tasks);
    parallel_for(tasks, config.jobs, [&](std::size_t task) {
      std::size_t si = task / static_cast<std::size_t>(m);
      int t = static_cast<int>(task % static_cast<std::size_t>(m));
      const EliminationTrace& trace = report.traces[si];
      std::string name = selector_name(trace.selector);
      uint64_t seed = seed_mix(seed_mix(seed_mix(config.seed, "cv"), name),
                               static_cast<uint64_t>(t));
      CvCurvePoint point;
      point.selector = name;
      point.iteration = t;
      point.score = cross_val_score(prepared.train, trace.surviving_set(t), cv_learner,
                                    config.cv_folds, seed);
      report.cv_curves[task] = std::move(point);
    });
    return 0;
  });
  report.stage_inputs.push_back("cv:" + prepared.train.provenance());

  run_stage("evaluate", [&] {
    int m = report.prefilter.kept.size();
    std::size_t n_heuristics = report.trajectories.size();
    std::size_t n_learners = config.learners.size();
    std::size_t tasks = n_heuristics * static_cast<std::size_t>(m) * n_learners;
    report.evaluations.resize(tasks);
    parallel_for(tasks, config.jobs, [&](std::size_t task) {
      std::size_t hi = task / (static_cast<std::size_t>(m) * n_learners);
      std::size_t rest = task % (static_cast<std::size_t>(m) * n_learners);
      int t = static_cast<int>(rest / n_learners);
      std::size_t li = rest % n_learners;

      const EnsembleTrajectory& trajectory = report.trajectories[hi];
      LearnerConfig learner = config.make_learner(config.learners[li]);
      CandidateEvaluation row;
      row.heuristic = heuristic_name(trajectory.heuristic.kind);
      row.iteration = t;
      row.learner = learner.name();
      row.candidate = trajectory.per_iteration[static_cast<std::size_t>(t)].candidate;

      if (row.candidate.empty()) {
        row.evaluated_size = 0;
        row.outcome.skipped = true;
      } else {
        FeatureSet evaluated = config.onehot_augment
                                   ? augment_with_onehot(row.candidate, report.onehot_block)
                                   : row.candidate;
        row.evaluated_size = evaluated.size();
        uint64_t seed = seed_mix(seed_mix(seed_mix(config.seed, "evaluate"),
                                          learner.name()),
                                 evaluated.content_hash());
        row.outcome =
            evaluate_candidate(prepared.train, prepared.test, evaluated, learner, seed);
      }
      report.evaluations[task] = std::move(row);
    });

    report.baselines.resize(n_learners);
    parallel_for(n_learners, config.jobs, [&](std::size_t li) {
      LearnerConfig learner = config.make_learner(config.learners[li]);
      CandidateEvaluation row;
      row.heuristic = "baseline";
      row.iteration = -1;
      row.learner = learner.name();
      row.candidate = report.prefilter.kept;
      FeatureSet evaluated = config.onehot_augment
                                 ? augment_with_onehot(row.candidate, report.onehot_block)
                                 : row.candidate;
      row.evaluated_size = evaluated.size();
      uint64_t seed = seed_mix(seed_mix(seed_mix(config.seed, "evaluate"),
                                        learner.name()),
                               evaluated.content_hash());
      row.outcome =
          evaluate_candidate(prepared.train, prepared.test, evaluated, learner, seed);
      report.baselines[li] = std::move(row);
    });
    return 0;
  });
  report.stage_inputs.push_back("evaluate:train=" + prepared.train.provenance());
  report.stage_inputs.push_back("evaluate:test=" + prepared.test.provenance());

  return report;
}

EvaluationReport run_experiment(const RunConfig& config) {
  validate_config(config);

  PreparedData prepared = run_stage("prepare", [&] { return prepare_datasets(config); });

  CorrelationReport prefilter = run_stage("prefilter", [&] {
    return correlation_prefilter(prepared.train, config.prefilter_threshold);
  });

  std::vector<EliminationTrace> traces = run_stage("trace", [&] {
    return run_traces(prepared.train, prefilter.kept, config);
  });

  std::vector<EnsembleTrajectory> trajectories =
      run_stage("combine", [&] { return build_trajectories(traces, config); });

  return finish_experiment(config, prepared, prefilter, traces, trajectories);
}

std::vector<TimingRow> timing_curve(const EvaluationReport& report) {
  struct Tagged {
    TimingRow row;
    std::string heuristic;
    std::string learner;
    int iteration;
  };
  std::vector<Tagged> rows;
  auto add = [&](const CandidateEvaluation& e) {
    if (e.outcome.skipped) return;
    rows.push_back({{e.evaluated_size, e.outcome.metrics.train_seconds,
                     e.outcome.metrics.test_seconds},
                    e.heuristic,
                    e.learner,
                    e.iteration});
  };
  for (const auto& e : report.evaluations) add(e);
  for (const auto& e : report.baselines) add(e);
  std::sort(rows.begin(), rows.end(), [](const Tagged& a, const Tagged& b) {
    if (a.row.feature_count != b.row.feature_count) {
      return a.row.feature_count > b.row.feature_count;
    }
    if (a.heuristic != b.heuristic) return a.heuristic < b.heuristic;
    if (a.learner != b.learner) return a.learner < b.learner;
    return a.iteration < b.iteration;
  });
  std::vector<TimingRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.row);
  return out;
}

}  // namespace enfs
