#include "enfs/json_io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

namespace enfs {

namespace {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

json parse_doc(const std::string& text, const char* kind) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw DataError(std::string(kind) + " artifact: not a JSON object");
  }
  if (j.value("artifact", std::string()) != kind) {
    throw DataError(std::string(kind) + " artifact: wrong or missing 'artifact' tag");
  }
  return j;
}

// Field access that converts nlohmann's exceptions into DataError with the
// artifact kind and key named.
template <typename T>
T req(const json& j, const char* key, const char* kind) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string(kind) + " artifact: bad field '" + key + "': " + e.what());
  }
}

json feature_set_json(const FeatureSet& s) { return json(s.ids()); }

FeatureSet feature_set_from(const json& j, const char* key, const char* kind) {
  std::vector<int> ids = req<std::vector<int>>(j, key, kind);
  try {
    return FeatureSet(std::move(ids));
  } catch (const std::exception& e) {
    throw DataError(std::string(kind) + " artifact: bad field '" + key + "': " + e.what());
  }
}

json trace_body(const EliminationTrace& trace) {
  json j;
  j["selector"] = selector_name(trace.selector);
  j["seed"] = hex_u64(trace.seed);
  j["start_set"] = feature_set_json(trace.start_set);
  j["order"] = trace.order;
  j["scores"] = trace.scores;
  return j;
}

EliminationTrace trace_from_body(const json& j, const char* kind) {
  EliminationTrace trace;
  try {
    trace.selector = selector_from_name(req<std::string>(j, "selector", kind));
  } catch (const UsageError& e) {
    throw DataError(std::string(kind) + " artifact: " + e.what());
  }
  trace.seed = parse_hex_u64(req<std::string>(j, "seed", kind));
  trace.start_set = feature_set_from(j, "start_set", kind);
  trace.order = req<std::vector<int>>(j, "order", kind);
  trace.scores = req<std::vector<double>>(j, "scores", kind);
  try {
    trace.validate();
  } catch (const std::exception& e) {
    throw DataError(std::string(kind) + " artifact: invalid trace: " + e.what());
  }
  return trace;
}

json trajectory_body(const EnsembleTrajectory& trajectory) {
  json j;
  j["heuristic"] = heuristic_name(trajectory.heuristic.kind);
  j["quorum_threshold"] = trajectory.heuristic.quorum_threshold;
  json entries = json::array();
  for (const auto& entry : trajectory.per_iteration) {
    json e;
    e["t"] = entry.t;
    e["candidate"] = feature_set_json(entry.candidate);
    entries.push_back(std::move(e));
  }
  j["per_iteration"] = std::move(entries);
  return j;
}

EnsembleTrajectory trajectory_from_body(const json& j, const char* kind) {
  EnsembleTrajectory trajectory;
  try {
    trajectory.heuristic.kind = heuristic_from_name(req<std::string>(j, "heuristic", kind));
  } catch (const UsageError& e) {
    throw DataError(std::string(kind) + " artifact: " + e.what());
  }
  trajectory.heuristic.quorum_threshold = req<int>(j, "quorum_threshold", kind);
  json entries = req<json>(j, "per_iteration", kind);
  if (!entries.is_array()) {
    throw DataError(std::string(kind) + " artifact: 'per_iteration' must be an array");
  }
  for (const auto& e : entries) {
    EnsembleTrajectory::Entry entry;
    entry.t = req<int>(e, "t", kind);
    entry.candidate = feature_set_from(e, "candidate", kind);
    trajectory.per_iteration.push_back(std::move(entry));
  }
  return trajectory;
}

// Full config echo under the config file's own key names, so a manifest can
// be pasted back into a config file. --jobs is an execution detail and is
// deliberately absent.
json config_json(const RunConfig& c) {
  json j;
  j["data.source"] = c.source;
  j["data.train"] = c.train_csv;
  j["data.test"] = c.test_csv;
  j["data.schema"] = c.schema_path;
  j["data.label"] = c.label_column;
  j["synth.rows"] = c.synth.n_rows;
  j["synth.informative"] = c.synth.n_informative;
  j["synth.noise"] = c.synth.n_noise;
  j["synth.redundant"] = c.synth.n_redundant;
  j["synth.flip_prob"] = c.synth.flip_prob;
  j["prefilter.threshold"] = c.prefilter_threshold;
  json selectors = json::array();
  for (SelectorKind s : c.selectors) selectors.push_back(selector_name(s));
  j["selectors"] = std::move(selectors);
  json heuristics = json::array();
  for (HeuristicKind h : c.heuristics) heuristics.push_back(heuristic_name(h));
  j["heuristics"] = std::move(heuristics);
  j["quorum.threshold"] = c.quorum_threshold;
  json learners = json::array();
  for (LearnerConfig::Kind k : c.learners) {
    learners.push_back(k == LearnerConfig::Kind::LogReg ? "lr" : "rf");
  }
  j["learners"] = std::move(learners);
  j["lr.learning_rate"] = c.logreg.learning_rate;
  j["lr.iterations"] = c.logreg.iterations;
  j["lr.l2"] = c.logreg.l2;
  j["rf.trees"] = c.forest.n_trees;
  j["rf.max_depth"] = c.forest.max_depth;
  j["sbs.folds"] = c.sbs.cv_folds;
  j["sbs.trees"] = c.sbs.learner.n_trees;
  j["cv.folds"] = c.cv_folds;
  j["cv.learner"] = c.cv_learner;
  j["cv.trees"] = c.cv_trees;
  j["onehot.augment"] = c.onehot_augment;
  j["seed"] = std::to_string(c.seed);
  j["repeat.index"] = c.repeat_index;
  return j;
}

json metrics_json(const Metrics& m, bool strip_timing) {
  json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["tp"] = m.cm.tp;
  j["fp"] = m.cm.fp;
  j["fn"] = m.cm.fn;
  j["tn"] = m.cm.tn;
  j["degenerate_precision"] = m.degenerate_precision;
  j["degenerate_recall"] = m.degenerate_recall;
  j["degenerate_f1"] = m.degenerate_f1;
  j["train_seconds"] = strip_timing ? 0.0 : m.train_seconds;
  j["test_seconds"] = strip_timing ? 0.0 : m.test_seconds;
  return j;
}

json evaluation_json(const CandidateEvaluation& e, bool strip_timing) {
  json j;
  j["heuristic"] = e.heuristic;
  j["iteration"] = e.iteration;
  j["learner"] = e.learner;
  j["candidate"] = feature_set_json(e.candidate);
  j["evaluated_size"] = e.evaluated_size;
  j["skipped"] = e.outcome.skipped;
  if (!e.outcome.skipped) j["metrics"] = metrics_json(e.outcome.metrics, strip_timing);
  return j;
}

json prefilter_json_body(const CorrelationReport& r) {
  json j;
  j["threshold"] = r.threshold;
  j["kept"] = feature_set_json(r.kept);
  json dropped = json::array();
  for (const auto& d : r.dropped) {
    json e;
    e["id"] = d.id;
    e["partner"] = d.partner;
    e["abs_corr"] = d.abs_corr;
    dropped.push_back(std::move(e));
  }
  j["dropped"] = std::move(dropped);
  return j;
}

json report_json_doc(const EvaluationReport& report, bool strip_timing) {
  json j;
  j["report_version"] = 1;
  j["config"] = config_json(report.config);

  json data;
  data["train_provenance"] = report.train_provenance;
  data["test_provenance"] = report.test_provenance;
  data["train_fingerprint"] = hex_u64(report.train_fingerprint);
  data["test_fingerprint"] = hex_u64(report.test_fingerprint);
  data["columns"] = report.column_names;
  data["dropped_zero_variance"] = report.dropped_zero_variance;
  data["excluded_columns"] = report.excluded_columns;
  data["onehot_block"] = feature_set_json(report.onehot_block);
  j["data"] = std::move(data);

  j["prefilter"] = prefilter_json_body(report.prefilter);

  json traces = json::array();
  for (const auto& t : report.traces) traces.push_back(trace_body(t));
  j["traces"] = std::move(traces);

  json trajectories = json::array();
  for (const auto& t : report.trajectories) trajectories.push_back(trajectory_body(t));
  j["trajectories"] = std::move(trajectories);

  json curves = json::array();
  for (const auto& p : report.cv_curves) {
    json e;
    e["selector"] = p.selector;
    e["iteration"] = p.iteration;
    e["skipped"] = p.score.skipped;
    if (!p.score.skipped) {
      e["mean"] = p.score.mean;
      e["stdev"] = p.score.stdev;
    }
    curves.push_back(std::move(e));
  }
  j["cv_curves"] = std::move(curves);

  json evaluations = json::array();
  for (const auto& e : report.evaluations) {
    evaluations.push_back(evaluation_json(e, strip_timing));
  }
  j["evaluations"] = std::move(evaluations);

  json baselines = json::array();
  for (const auto& e : report.baselines) {
    baselines.push_back(evaluation_json(e, strip_timing));
  }
  j["baselines"] = std::move(baselines);

  j["stage_inputs"] = report.stage_inputs;
  return j;
}

}  // namespace

std::string hex_u64(uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

uint64_t parse_hex_u64(const std::string& s) {
  if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X')) {
    throw DataError("expected 0x-prefixed hex value, got '" + s + "'");
  }
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data() + 2, s.data() + s.size(), v, 16);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("expected 0x-prefixed hex value, got '" + s + "'");
  }
  return v;
}

std::string prefilter_to_json(const CorrelationReport& report, uint64_t fingerprint) {
  json j;
  j["artifact"] = "prefilter";
  j["version"] = 1;
  j["dataset_fingerprint"] = hex_u64(fingerprint);
  j.update(prefilter_json_body(report));
  return j.dump(2) + "\n";
}

CorrelationReport prefilter_from_json(const std::string& text, uint64_t* fingerprint) {
  json j = parse_doc(text, "prefilter");
  if (fingerprint) {
    *fingerprint = parse_hex_u64(req<std::string>(j, "dataset_fingerprint", "prefilter"));
  }
  CorrelationReport report;
  report.threshold = req<double>(j, "threshold", "prefilter");
  report.kept = feature_set_from(j, "kept", "prefilter");
  json dropped = req<json>(j, "dropped", "prefilter");
  if (!dropped.is_array()) throw DataError("prefilter artifact: 'dropped' must be an array");
  for (const auto& e : dropped) {
    CorrelationReport::Dropped d{};
    d.id = req<int>(e, "id", "prefilter");
    d.partner = req<int>(e, "partner", "prefilter");
    d.abs_corr = req<double>(e, "abs_corr", "prefilter");
    report.dropped.push_back(d);
  }
  return report;
}

std::string trace_to_json(const EliminationTrace& trace, uint64_t fingerprint,
                          const RunConfig& config) {
  json j;
  j["artifact"] = "trace";
  j["version"] = 1;
  j["dataset_fingerprint"] = hex_u64(fingerprint);
  j.update(trace_body(trace));
  j["config"] = config_json(config);
  return j.dump(2) + "\n";
}

EliminationTrace trace_from_json(const std::string& text, uint64_t* fingerprint) {
  json j = parse_doc(text, "trace");
  if (fingerprint) {
    *fingerprint = parse_hex_u64(req<std::string>(j, "dataset_fingerprint", "trace"));
  }
  return trace_from_body(j, "trace");
}

std::string combined_to_json(const std::vector<EliminationTrace>& traces,
                             const std::vector<EnsembleTrajectory>& trajectories,
                             uint64_t fingerprint) {
  json j;
  j["artifact"] = "combined";
  j["version"] = 1;
  j["dataset_fingerprint"] = hex_u64(fingerprint);
  json ts = json::array();
  for (const auto& t : traces) ts.push_back(trace_body(t));
  j["traces"] = std::move(ts);
  json js = json::array();
  for (const auto& t : trajectories) js.push_back(trajectory_body(t));
  j["trajectories"] = std::move(js);
  return j.dump(2) + "\n";
}

void combined_from_json(const std::string& text, std::vector<EliminationTrace>* traces,
                        std::vector<EnsembleTrajectory>* trajectories,
                        uint64_t* fingerprint) {
  json j = parse_doc(text, "combined");
  if (fingerprint) {
    *fingerprint = parse_hex_u64(req<std::string>(j, "dataset_fingerprint", "combined"));
  }
  json ts = req<json>(j, "traces", "combined");
  json js = req<json>(j, "trajectories", "combined");
  if (!ts.is_array() || !js.is_array()) {
    throw DataError("combined artifact: 'traces' and 'trajectories' must be arrays");
  }
  traces->clear();
  for (const auto& t : ts) traces->push_back(trace_from_body(t, "combined"));
  trajectories->clear();
  for (const auto& t : js) trajectories->push_back(trajectory_from_body(t, "combined"));
}

std::string report_to_json(const EvaluationReport& report) {
  return report_json_doc(report, false).dump(2) + "\n";
}

std::string canonical_report_json(const EvaluationReport& report) {
  return report_json_doc(report, true).dump(2) + "\n";
}

std::string manifest_to_json(const EvaluationReport& report) {
  json j;
  j["manifest_version"] = 1;
  j["config"] = config_json(report.config);

  json data;
  data["train_provenance"] = report.train_provenance;
  data["test_provenance"] = report.test_provenance;
  data["train_fingerprint"] = hex_u64(report.train_fingerprint);
  data["test_fingerprint"] = hex_u64(report.test_fingerprint);
  data["columns"] = report.column_names;
  data["dropped_zero_variance"] = report.dropped_zero_variance;
  data["excluded_columns"] = report.excluded_columns;
  data["onehot_block"] = feature_set_json(report.onehot_block);
  j["data"] = std::move(data);

  json seeds;
  seeds["master"] = std::to_string(report.config.seed);
  seeds["repeat_index"] = report.config.repeat_index;
  json trace_seeds;
  for (const auto& t : report.traces) {
    trace_seeds[selector_name(t.selector)] = hex_u64(t.seed);
  }
  seeds["traces"] = std::move(trace_seeds);
  j["seeds"] = std::move(seeds);

  json notes;
  notes["sbs_criterion"] = "forest(trees=" + std::to_string(report.config.sbs.learner.n_trees) +
                           "), " + std::to_string(report.config.sbs.cv_folds) +
                           "-fold stratified CV per removal candidate";
  const LearnerConfig cv = report.config.make_cv_learner();
  notes["cv_scoring"] = (cv.kind == LearnerConfig::Kind::Forest
                             ? "forest(trees=" + std::to_string(cv.forest.n_trees) + ")"
                             : std::string("logistic regression")) +
                        ", " + std::to_string(report.config.cv_folds) +
                        "-fold stratified CV on training data only";
  j["notes"] = std::move(notes);

  j["stage_inputs"] = report.stage_inputs;

  json digests;
  digests["report_canonical"] = hex_u64(fnv1a64(canonical_report_json(report)));
  digests["cv_curves.csv"] = hex_u64(fnv1a64(cv_curves_csv(report)));
  digests["heuristic_curves.csv"] = hex_u64(fnv1a64(heuristic_curves_csv(report)));
  j["digests"] = std::move(digests);
  return j.dump(2) + "\n";
}

std::string cv_curves_csv(const EvaluationReport& report) {
  std::string out = "selector,iteration,mean,stdev\n";
  for (const auto& p : report.cv_curves) {
    out += p.selector;
    out += ',';
    out += std::to_string(p.iteration);
    out += ',';
    if (!p.score.skipped) {
      out += format_double(p.score.mean);
      out += ',';
      out += format_double(p.score.stdev);
    } else {
      out += ',';
    }
    out += '\n';
  }
  return out;
}

std::string heuristic_curves_csv(const EvaluationReport& report) {
  std::string out = "heuristic,iteration,size,learner,f1,accuracy\n";
  auto row = [&out](const CandidateEvaluation& e) {
    out += e.heuristic;
    out += ',';
    out += std::to_string(e.iteration);
    out += ',';
    out += std::to_string(e.evaluated_size);
    out += ',';
    out += e.learner;
    out += ',';
    if (!e.outcome.skipped) {
      out += format_double(e.outcome.metrics.f1);
      out += ',';
      out += format_double(e.outcome.metrics.accuracy);
    } else {
      out += ',';
    }
    out += '\n';
  };
  for (const auto& e : report.baselines) row(e);
  for (const auto& e : report.evaluations) row(e);
  return out;
}

std::string trajectories_csv(const EvaluationReport& report) {
  std::string out = "iteration,heuristic,size,features\n";
  for (const auto& trajectory : report.trajectories) {
    std::string name = heuristic_name(trajectory.heuristic.kind);
    for (const auto& entry : trajectory.per_iteration) {
      out += std::to_string(entry.t);
      out += ',';
      out += name;
      out += ',';
      out += std::to_string(entry.candidate.size());
      out += ',';
      std::string joined;
      for (int id : entry.candidate) {
        if (!joined.empty()) joined += ',';
        joined += report.column_names[static_cast<std::size_t>(id)];
      }
      if (!joined.empty()) {
        std::string quoted = "\"";
        for (char c : joined) {
          if (c == '"') quoted += '"';
          quoted += c;
        }
        quoted += '"';
        out += quoted;
      }
      out += '\n';
    }
  }
  return out;
}

std::string timing_csv(const EvaluationReport& report) {
  std::string out = "feature_count,train_seconds,test_seconds\n";
  for (const TimingRow& r : timing_curve(report)) {
    out += std::to_string(r.feature_count);
    out += ',';
    out += format_double(r.train_seconds);
    out += ',';
    out += format_double(r.test_seconds);
    out += '\n';
  }
  return out;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) {
      throw DataError("cannot create directory '" + target.parent_path().string() +
                      "': " + ec.message());
    }
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw DataError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataError("cannot rename '" + tmp.string() + "' to '" + target.string() +
                    "': " + ec.message());
  }
}

void write_run_outputs(const EvaluationReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::path dir(out_dir);
  atomic_write((dir / "report.json").string(), report_to_json(report));
  atomic_write((dir / "manifest.json").string(), manifest_to_json(report));
  atomic_write((dir / "cv_curves.csv").string(), cv_curves_csv(report));
  atomic_write((dir / "heuristic_curves.csv").string(), heuristic_curves_csv(report));
  atomic_write((dir / "trajectories.csv").string(), trajectories_csv(report));
  atomic_write((dir / "timing.csv").string(), timing_csv(report));
}

}  // namespace enfs
