// Acceptance suite for the two-round ensemble feature-selection pipeline.
// Each criterion prints one line: [ACCEPTANCE] <id> <name>: PASS/FAIL/SKIP.
// Runtime caps are part of the criteria: exceeding one fails the criterion
// even when every check inside it held. The exit code is the number of
// failed criteria (skipped optional criteria do not count).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "enfs/ensemble.hpp"
#include "enfs/evaluation.hpp"
#include "enfs/json_io.hpp"
#include "util.hpp"

using namespace enfs;
namespace fs = std::filesystem;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Result {
  Outcome outcome = Outcome::Fail;
  std::string detail;
};

Result pass(std::string detail) { return {Outcome::Pass, std::move(detail)}; }
Result fail(std::string detail) { return {Outcome::Fail, std::move(detail)}; }
Result skip(std::string detail) { return {Outcome::Skip, std::move(detail)}; }

int g_failures = 0;

void criterion(const char* id, const char* name, double cap_seconds,
               const std::function<Result()>& body) {
  auto start = std::chrono::steady_clock::now();
  Result r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = fail(std::string("exception: ") + e.what());
  }
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.outcome == Outcome::Pass && cap_seconds > 0.0 && elapsed > cap_seconds) {
    char note[128];
    std::snprintf(note, sizeof(note), "runtime cap %.0fs exceeded", cap_seconds);
    r = fail(r.detail + "; " + note);
  }
  const char* verdict = r.outcome == Outcome::Pass   ? "PASS"
                        : r.outcome == Outcome::Skip ? "SKIP"
                                                     : "FAIL";
  std::printf("[ACCEPTANCE] %s %s: %s (%s, %.1fs)\n", id, name, verdict,
              r.detail.c_str(), elapsed);
  std::fflush(stdout);
  if (r.outcome == Outcome::Fail) ++g_failures;
}

FeatureSet from_std(const std::set<int>& s) {
  return FeatureSet(std::vector<int>(s.begin(), s.end()));
}

// ---- C1: set algebra over randomized trace quadruples ----------------------

Result check_set_algebra() {
  std::mt19937_64 rng(20250819);
  long long checks = 0;
  for (int q = 0; q < 1000; ++q) {
    int m = 2 + static_cast<int>(rng() % 29);  // 2..30 features
    std::set<int> universe;
    while (static_cast<int>(universe.size()) < m) {
      universe.insert(static_cast<int>(rng() % 200));
    }
    std::vector<int> start(universe.begin(), universe.end());
    std::vector<EliminationTrace> traces;
    for (int k = 0; k < 4; ++k) traces.push_back(oracles::random_trace(rng, start));

    for (int t = 0; t < m; ++t) {
      FeatureSet u = combine(traces, t, {HeuristicKind::Union});
      FeatureSet i = combine(traces, t, {HeuristicKind::Intersection});
      FeatureSet q3 = combine(traces, t, {HeuristicKind::Quorum});  // 3 of 4

      if (!i.is_subset_of(q3) || !q3.is_subset_of(u)) {
        return fail("nesting chain violated at quadruple " + std::to_string(q) +
                    ", iteration " + std::to_string(t));
      }
      if (!(combine(traces, t, {HeuristicKind::Quorum, 1}) == u) ||
          !(combine(traces, t, {HeuristicKind::Quorum, 4}) == i)) {
        return fail("quorum(1)/quorum(4) identity violated at quadruple " +
                    std::to_string(q));
      }

      std::vector<std::set<int>> survivors;
      for (const auto& trace : traces) {
        FeatureSet s = trace.surviving_set(t);
        survivors.emplace_back(s.begin(), s.end());
      }
      if (!(u == from_std(oracles::combine_sets(survivors, 1))) ||
          !(q3 == from_std(oracles::combine_sets(survivors, 3))) ||
          !(i == from_std(oracles::combine_sets(survivors, 4)))) {
        return fail("vote-count oracle mismatch at quadruple " + std::to_string(q));
      }
      checks += 5;
    }
  }
  return pass("1000 quadruples, " + std::to_string(checks) + " combine checks");
}

// ---- C2: trace contracts on 12-feature synthetic data ----------------------

Result check_trace_contracts() {
  int traces_checked = 0;
  for (uint64_t seed : {11ull, 12ull}) {
    SynthParams p;
    p.n_rows = 400;
    p.n_informative = 3;
    p.n_noise = 7;
    p.n_redundant = 2;
    p.flip_prob = 0.05;
    p.seed = seed;
    Dataset raw = synth_generate(p).train;
    Dataset d = normalize_minmax(raw, raw);
    FeatureSet all = d.all_features();
    if (all.size() != 12) return fail("expected 12 features");

    std::vector<EliminationTrace> traces;
    traces.push_back(univariate_trace(d, all));
    traces.push_back(rfe_trace(d, all, seed));
    traces.push_back(sbs_trace(d, all, seed));
    traces.push_back(importance_trace(d, all, seed));

    for (const auto& trace : traces) {
      trace.validate();
      for (int t = 0; t <= trace.iterations(); ++t) {
        FeatureSet now = trace.surviving_set(t);
        if (now.size() != 12 - t) {
          return fail(selector_name(trace.selector) + " surviving size at t=" +
                      std::to_string(t) + " is " + std::to_string(now.size()));
        }
        if (t > 0 && !now.is_subset_of(trace.surviving_set(t - 1))) {
          return fail(selector_name(trace.selector) + " not nested at t=" +
                      std::to_string(t));
        }
      }
      ++traces_checked;
    }

    // univariate order must equal an independent chi-square sort
    std::vector<std::pair<double, int>> ranked;
    for (int id : all) {
      ranked.emplace_back(oracles::chi_square(d.column_values(id), d.labels()), id);
    }
    std::sort(ranked.begin(), ranked.end());
    const EliminationTrace& uni = traces[0];
    for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
      if (uni.order[i] != ranked[i].second) {
        return fail("univariate order differs from brute-force chi sort at rank " +
                    std::to_string(i));
      }
    }
  }
  return pass("2 seeds x 4 selectors nested 12..1, univariate == chi sort; " +
              std::to_string(traces_checked) + " traces");
}

// ---- C3: planted-structure recovery ----------------------------------------

Result check_planted_recovery() {
  RunConfig config;
  config.source = "synth";
  config.synth.n_rows = 2000;
  config.synth.n_informative = 3;
  config.synth.n_noise = 12;
  config.synth.n_redundant = 2;
  config.synth.flip_prob = 0.05;
  config.seed = 6021023;
  config.seed_set = true;
  config.jobs = static_cast<int>(std::max(2u, std::thread::hardware_concurrency()));

  PreparedData prepared = prepare_datasets(config);
  const Dataset& train = prepared.train;

  // informative columns occupy the leading ids in the generated layout
  FeatureSet informative{0, 1, 2};
  FeatureSet redundant{3, 4};

  // (a) the prefilter catches planted redundancy
  CorrelationReport pre = correlation_prefilter(train, 0.9);
  int redundant_dropped = 0;
  for (const auto& drop : pre.dropped) redundant_dropped += redundant.contains(drop.id);
  if (redundant_dropped < 1) {
    return fail("prefilter dropped no redundant column");
  }

  // (b) every selector retains all informative features into its last 5
  std::vector<EliminationTrace> traces = run_traces(train, pre.kept, config);
  int m = pre.kept.size();
  if (m < 5) return fail("kept set unexpectedly small: " + std::to_string(m));
  for (const auto& trace : traces) {
    FeatureSet last5 = trace.surviving_set(m - 5);
    if (!informative.is_subset_of(last5)) {
      return fail(selector_name(trace.selector) +
                  " lost an informative feature before the last 5");
    }
  }

  // (c) a small intersection candidate holds the full-feature F1
  EnsembleTrajectory trajectory = build_trajectory(traces, {HeuristicKind::Intersection});
  FeatureSet candidate;
  for (const auto& entry : trajectory.per_iteration) {
    if (entry.candidate.size() >= 1 && entry.candidate.size() <= 5) {
      candidate = entry.candidate;
      break;
    }
  }
  if (candidate.empty()) return fail("no intersection candidate of size 1..5");

  LearnerConfig rf = config.make_learner(LearnerConfig::Kind::Forest);
  auto eval_seed = [&](const FeatureSet& s) {
    return seed_mix(seed_mix(seed_mix(config.seed, "evaluate"), rf.name()),
                    s.content_hash());
  };
  double candidate_f1 =
      evaluate_candidate(train, prepared.test, candidate, rf, eval_seed(candidate))
          .metrics.f1;
  double baseline_f1 =
      evaluate_candidate(train, prepared.test, pre.kept, rf, eval_seed(pre.kept))
          .metrics.f1;
  if (candidate_f1 < baseline_f1 - 0.03) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "intersection size %d F1 %.4f vs baseline %.4f (gap > 0.03)",
                  candidate.size(), candidate_f1, baseline_f1);
    return fail(buf);
  }

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "dropped %d/2 redundant; informative in last-5 for all selectors; "
                "size-%d intersection F1 %.4f vs baseline %.4f",
                redundant_dropped, candidate.size(), candidate_f1, baseline_f1);
  return pass(buf);
}

// ---- C4: metric identities ---------------------------------------------------

Result check_metric_identities() {
  std::mt19937_64 rng(404);
  double worst_gap = 0.0;
  for (int i = 0; i < 10000; ++i) {
    ConfusionMatrix cm;
    // mix realistic scales with degenerate corners
    long long scale = (i % 3 == 0) ? 10 : 1000000;
    cm.tp = static_cast<long long>(rng() % scale);
    cm.fp = static_cast<long long>(rng() % scale);
    cm.fn = static_cast<long long>(rng() % scale);
    cm.tn = static_cast<long long>(rng() % scale);
    if (i % 97 == 0) cm.tp = 0;
    if (i % 193 == 0) { cm.tp = 0; cm.fp = 0; }
    if (i % 389 == 0) { cm.tp = 0; cm.fn = 0; }

    double p = precision_score(cm);
    double r = recall_score(cm);
    double f1 = f1_score(cm);
    double acc = accuracy_score(cm);

    for (double v : {p, r, f1, acc}) {
      if (!(v >= 0.0 && v <= 1.0)) return fail("metric outside [0,1]");
    }
    if (p + r > 0.0) {
      double harmonic = 2.0 * p * r / (p + r);
      double gap = std::abs(f1 - harmonic);
      worst_gap = std::max(worst_gap, gap);
      if (gap > 1e-12) return fail("harmonic identity gap " + std::to_string(gap));
    } else if (f1 != 0.0) {
      return fail("f1 nonzero with zero precision and recall");
    }

    if (cm.total() > 0 &&
        acc != static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total())) {
      return fail("accuracy formula mismatch");
    }
    if (cm.tp + cm.fp > 0 &&
        p != static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp)) {
      return fail("precision formula mismatch");
    }
    if (cm.tp + cm.fn > 0 &&
        r != static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn)) {
      return fail("recall formula mismatch");
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "10000 matrices, worst harmonic gap %.2e", worst_gap);
  return pass(buf);
}

// ---- C5: impurity and chi-square micro-oracles -------------------------------

Result check_micro_oracles() {
  for (int i = 0; i <= 100; ++i) {
    double p = static_cast<double>(i) / 100.0;
    if (gini_impurity(p) != 2.0 * p * (1.0 - p)) {
      return fail("gini grid mismatch at p=" + std::to_string(p));
    }
  }
  if (gini_impurity(0.5) != 0.5 || gini_impurity(0.0) != 0.0 ||
      gini_impurity(0.25) != 0.375) {
    return fail("gini worked values mismatch");
  }
  std::vector<double> x = {1.0, 1.0, 0.0, 0.0};
  std::vector<int> labels = {1, 1, 0, 0};
  double chi = chi_square_score(x, labels);
  if (chi != 2.0) return fail("worked chi-square example returned " + std::to_string(chi));
  return pass("101-point gini grid exact, worked chi example = 2.0");
}

// ---- C6: CLI determinism ------------------------------------------------------

int run_cli(const std::string& args, const fs::path& dir) {
  fs::create_directories(dir);
  std::string cmd = std::string(ENFS_CLI_PATH) + " " + args + " > " +
                    (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Zeroes the wall-clock fields so byte comparison sees only the run content.
std::string timing_normalized(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    for (const char* key : {"\"train_seconds\":", "\"test_seconds\":"}) {
      std::size_t pos = line.find(key);
      if (pos == std::string::npos) continue;
      bool comma = !line.empty() && line.back() == ',';
      line = line.substr(0, pos) + key + " 0" + (comma ? "," : "");
    }
    out += line;
    out += '\n';
  }
  return out;
}

Result check_cli_determinism() {
  fs::path dir = testutil::scratch_dir("acceptance_c6");
  testutil::write_file(dir / "run.conf",
                       "data.source = synth\n"
                       "synth.rows = 600\n"
                       "synth.informative = 3\n"
                       "synth.noise = 8\n"
                       "synth.redundant = 2\n"
                       "synth.flip_prob = 0.05\n"
                       "seed = 90210\n"
                       "rf.trees = 30\n"
                       "sbs.trees = 10\n"
                       "cv.folds = 3\n"
                       "cv.trees = 15\n"
                       "lr.iterations = 200\n");
  std::string config = (dir / "run.conf").string();

  if (run_cli("run --config " + config + " --out " + (dir / "a").string(), dir) != 0 ||
      run_cli("run --config " + config + " --out " + (dir / "b").string(), dir) != 0 ||
      run_cli("run --config " + config + " --out " + (dir / "c").string() + " --jobs 4",
              dir) != 0) {
    return fail("a run exited nonzero");
  }

  auto file = [&](const char* sub, const char* name) {
    return testutil::slurp(dir / sub / name);
  };
  for (const char* name : {"manifest.json", "cv_curves.csv", "heuristic_curves.csv",
                           "trajectories.csv"}) {
    std::string a = file("a", name);
    if (a.empty()) return fail(std::string(name) + " missing or empty");
    if (a != file("b", name)) return fail(std::string(name) + " differs between reruns");
    if (a != file("c", name)) return fail(std::string(name) + " differs under --jobs 4");
  }
  std::string report_a = timing_normalized(file("a", "report.json"));
  if (report_a != timing_normalized(file("b", "report.json"))) {
    return fail("report.json differs between reruns beyond timing");
  }
  if (report_a != timing_normalized(file("c", "report.json"))) {
    return fail("report.json differs under --jobs 4 beyond timing");
  }
  return pass("rerun and --jobs 4 byte-identical excluding timing");
}

// ---- C7: optional real-dataset checks ----------------------------------------

struct TimedEval {
  double f1 = 0.0;
  double train_seconds = 0.0;
};

TimedEval timed_forest_eval(const Dataset& train, const Dataset& test,
                            const FeatureSet& features, ForestConfig cfg,
                            uint64_t seed, int jobs) {
  cfg.seed = seed;
  auto t0 = std::chrono::steady_clock::now();
  ForestModel model = train_random_forest(train, features, cfg, jobs);
  TimedEval out;
  out.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.f1 = f1_score(confusion(test.labels(), predict(model, test, features)));
  return out;
}

Result check_real_dataset() {
  const char* train_env = std::getenv("ENFS_UNSW_TRAIN");
  const char* test_env = std::getenv("ENFS_UNSW_TEST");
  const char* schema_env = std::getenv("ENFS_UNSW_SCHEMA");
  if (train_env == nullptr || test_env == nullptr || schema_env == nullptr) {
    return skip("set ENFS_UNSW_TRAIN, ENFS_UNSW_TEST, ENFS_UNSW_SCHEMA to enable");
  }
  const char* label_env = std::getenv("ENFS_UNSW_LABEL");
  const int jobs = static_cast<int>(std::max(2u, std::thread::hardware_concurrency()));

  RunConfig config;
  config.source = "csv";
  config.train_csv = train_env;
  config.test_csv = test_env;
  config.schema_path = schema_env;
  config.label_column = label_env != nullptr ? label_env : "label";
  config.seed = 1;
  config.seed_set = true;
  config.jobs = jobs;

  PreparedData prepared = prepare_datasets(config);
  const Dataset& train = prepared.train;
  const Dataset& test = prepared.test;
  FeatureSet numeric = train.features_of_kind(ColumnKind::Numeric);

  ForestConfig rf_cfg = config.forest;  // 100 trees
  auto eval_seed = [&](const char* tag, const FeatureSet& s) {
    return seed_mix(seed_mix(seed_mix(config.seed, "evaluate"), tag), s.content_hash());
  };

  // full-numeric random-forest baseline
  TimedEval rf_full = timed_forest_eval(train, test, numeric, rf_cfg,
                                        eval_seed("rf", numeric), jobs);
  if (std::abs(rf_full.f1 - 0.896) > 0.03) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "full-numeric RF F1 %.4f outside 0.896 +- 0.03",
                  rf_full.f1);
    return fail(buf);
  }

  // full-numeric logistic-regression baseline sets the LR bar
  LearnerConfig lr = config.make_learner(LearnerConfig::Kind::LogReg);
  double lr_full = evaluate_candidate(train, test, numeric, lr, eval_seed("lr", numeric))
                       .metrics.f1;

  // round 1 on the full data; round 2 on a stratified slice so the wrapper
  // selector stays tractable at this row count
  CorrelationReport pre = correlation_prefilter(train, 0.9);
  Dataset trace_data = train;
  if (train.n_rows() > 12000) {
    int k = train.n_rows() / 8000;
    FoldPlan plan = stratified_kfold(train, k, seed_mix(config.seed, "trace-slice"));
    std::vector<int> rows;
    for (int i = 0; i < train.n_rows(); ++i) {
      if (plan.assignments[static_cast<std::size_t>(i)] == 0) rows.push_back(i);
    }
    trace_data = train.subset_rows(rows);
  }
  RunConfig trace_config = config;
  trace_config.sbs.learner.n_trees = 15;
  std::vector<EliminationTrace> traces = run_traces(trace_data, pre.kept, trace_config);

  // intersection candidates of 3..5 features must stay competitive with RF
  EnsembleTrajectory intersection =
      build_trajectory(traces, {HeuristicKind::Intersection});
  double best_small_rf = -1.0;
  int best_small_size = 0;
  std::set<uint64_t> seen;
  for (const auto& entry : intersection.per_iteration) {
    int size = entry.candidate.size();
    if (size < 3 || size > 5 || !seen.insert(entry.candidate.content_hash()).second) {
      continue;
    }
    TimedEval e = timed_forest_eval(train, test, entry.candidate, rf_cfg,
                                    eval_seed("rf", entry.candidate), jobs);
    if (e.f1 > best_small_rf) {
      best_small_rf = e.f1;
      best_small_size = size;
    }
  }
  if (best_small_rf < 0.0) return fail("no intersection candidate of size 3..5");
  if (best_small_rf < 0.85) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "best 3..5-feature intersection RF F1 %.4f < 0.85",
                  best_small_rf);
    return fail(buf);
  }

  // small quorum/intersection candidates with LR stay near the LR baseline
  EnsembleTrajectory quorum = build_trajectory(traces, {HeuristicKind::Quorum});
  double best_small_lr = -1.0;
  seen.clear();
  for (const auto* trajectory : {&quorum, &intersection}) {
    for (const auto& entry : trajectory->per_iteration) {
      int size = entry.candidate.size();
      if (size < 1 || size > 8 || !seen.insert(entry.candidate.content_hash()).second) {
        continue;
      }
      double f1 = evaluate_candidate(train, test, entry.candidate, lr,
                                     eval_seed("lr", entry.candidate))
                      .metrics.f1;
      best_small_lr = std::max(best_small_lr, f1);
    }
  }
  if (best_small_lr < lr_full - 0.03) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "best small-candidate LR F1 %.4f below LR baseline %.4f - 0.03",
                  best_small_lr, lr_full);
    return fail(buf);
  }

  // training time must fall with the feature count (rank correlation)
  EnsembleTrajectory unions = build_trajectory(traces, {HeuristicKind::Union});
  std::vector<double> sizes, times;
  std::set<int> seen_sizes;
  int step = std::max(1, static_cast<int>(unions.per_iteration.size()) / 10);
  for (std::size_t i = 0; i < unions.per_iteration.size(); i += static_cast<std::size_t>(step)) {
    const FeatureSet& cand = unions.per_iteration[i].candidate;
    if (cand.empty() || !seen_sizes.insert(cand.size()).second) continue;
    TimedEval e = timed_forest_eval(train, test, cand, rf_cfg, eval_seed("rf", cand),
                                    jobs);
    sizes.push_back(static_cast<double>(cand.size()));
    times.push_back(e.train_seconds);
  }
  if (sizes.size() < 4) return fail("too few distinct candidate sizes for the trend");
  double rho = oracles::spearman(sizes, times);
  if (rho <= 0.6) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "Spearman(feature count, train time) %.3f <= 0.6", rho);
    return fail(buf);
  }

  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "RF full %.4f; best 3..5 intersection RF %.4f (size %d); "
                "LR full %.4f, best small LR %.4f; Spearman %.3f over %zu sizes",
                rf_full.f1, best_small_rf, best_small_size, lr_full, best_small_lr, rho,
                sizes.size());
  return pass(buf);
}

}  // namespace

int main() {
  criterion("C1", "set-algebra", 10.0, check_set_algebra);
  criterion("C2", "trace-contracts", 30.0, check_trace_contracts);
  criterion("C3", "planted-recovery", 300.0, check_planted_recovery);
  criterion("C4", "metric-identities", 5.0, check_metric_identities);
  criterion("C5", "micro-oracles", 1.0, check_micro_oracles);
  criterion("C6", "cli-determinism", 300.0, check_cli_determinism);
  criterion("C7", "real-dataset", 0.0, check_real_dataset);

  if (g_failures == 0) {
    std::printf("[ACCEPTANCE] all mandatory criteria passed\n");
  } else {
    std::printf("[ACCEPTANCE] %d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
