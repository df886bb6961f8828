#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "enfs/evaluation.hpp"
#include "enfs/json_io.hpp"

namespace {

using namespace enfs;
namespace fs = std::filesystem;

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (...) {
    rethrow_stage_error(name);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load_run_config(const std::string& path, int jobs) {
  RunConfig config = load_config(path);
  if (jobs > 0) config.jobs = jobs;
  validate_config(config);
  return config;
}

std::string pick_out_dir(const std::string& flag, const RunConfig& config) {
  if (!flag.empty()) return flag;
  if (!config.out_dir.empty()) return config.out_dir;
  throw UsageError("no output directory: pass --out or set 'out' in the config");
}

// Rename-into-place so an interrupted write leaves no partial CSV behind.
void write_csv_atomic(const Dataset& d, const std::string& path) {
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
  write_csv(d, tmp.string());
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataError("cannot rename '" + tmp.string() + "' to '" + target.string() +
                    "': " + ec.message());
  }
}

uint64_t require_fingerprint(const std::string& artifact_path, uint64_t artifact_fp,
                             uint64_t data_fp) {
  if (artifact_fp != data_fp) {
    throw DataError("'" + artifact_path +
                    "' was computed from different data (fingerprint " +
                    hex_u64(artifact_fp) + ", expected " + hex_u64(data_fp) + ")");
  }
  return artifact_fp;
}

int cmd_synth(const std::string& config_path, const std::string& out_train,
              const std::string& out_test, const std::string& out_schema) {
  RunConfig config = load_run_config(config_path, 0);
  SynthParams params = config.synth;
  params.seed = seed_mix(config.seed, "synth-data");
  if (config.repeat_index > 0) {
    params.seed = seed_mix(params.seed, static_cast<uint64_t>(config.repeat_index));
  }
  SynthData data = stage("prepare", [&] { return synth_generate(params); });
  write_csv_atomic(data.train, out_train);
  write_csv_atomic(data.test, out_test);
  if (!out_schema.empty()) {
    atomic_write(out_schema, schema_to_text(schema_for(data.train)));
  }
  return 0;
}

int cmd_prefilter(const std::string& config_path, const std::string& out_path) {
  RunConfig config = load_run_config(config_path, 0);
  PreparedData prepared = stage("prepare", [&] { return prepare_datasets(config); });
  CorrelationReport report = stage("prefilter", [&] {
    return correlation_prefilter(prepared.train, config.prefilter_threshold);
  });
  atomic_write(out_path, prefilter_to_json(report, prepared.train.fingerprint()));
  return 0;
}

int cmd_trace(const std::string& config_path, const std::string& prefilter_path,
              const std::string& selector, const std::string& out_path, int jobs) {
  SelectorKind kind = selector_from_name(selector);
  RunConfig config = load_run_config(config_path, jobs);
  PreparedData prepared = stage("prepare", [&] { return prepare_datasets(config); });
  uint64_t artifact_fp = 0;
  CorrelationReport pre = prefilter_from_json(read_file(prefilter_path), &artifact_fp);
  require_fingerprint(prefilter_path, artifact_fp, prepared.train.fingerprint());
  EliminationTrace trace = stage("trace", [&] {
    return run_one_trace(prepared.train, pre.kept, kind, config);
  });
  atomic_write(out_path, trace_to_json(trace, artifact_fp, config));
  return 0;
}

int cmd_combine(const std::string& config_path, const std::vector<std::string>& trace_paths,
                const std::string& out_path) {
  RunConfig config = load_run_config(config_path, 0);
  std::vector<EliminationTrace> traces;
  uint64_t fp = 0;
  for (const std::string& path : trace_paths) {
    uint64_t trace_fp = 0;
    EliminationTrace trace = trace_from_json(read_file(path), &trace_fp);
    if (traces.empty()) {
      fp = trace_fp;
    } else {
      require_fingerprint(path, trace_fp, fp);
      if (!(trace.start_set == traces.front().start_set)) {
        throw DataError("'" + path + "' starts from a different feature set");
      }
    }
    traces.push_back(std::move(trace));
  }
  std::vector<EnsembleTrajectory> trajectories =
      stage("combine", [&] { return build_trajectories(traces, config); });
  atomic_write(out_path, combined_to_json(traces, trajectories, fp));
  return 0;
}

int cmd_evaluate(const std::string& config_path, const std::string& prefilter_path,
                 const std::string& combined_path, const std::string& out_flag, int jobs) {
  RunConfig config = load_run_config(config_path, jobs);
  std::string out_dir = pick_out_dir(out_flag, config);
  PreparedData prepared = stage("prepare", [&] { return prepare_datasets(config); });
  uint64_t data_fp = prepared.train.fingerprint();

  uint64_t pre_fp = 0;
  CorrelationReport pre = prefilter_from_json(read_file(prefilter_path), &pre_fp);
  require_fingerprint(prefilter_path, pre_fp, data_fp);

  uint64_t combined_fp = 0;
  std::vector<EliminationTrace> traces;
  std::vector<EnsembleTrajectory> trajectories;
  combined_from_json(read_file(combined_path), &traces, &trajectories, &combined_fp);
  require_fingerprint(combined_path, combined_fp, data_fp);

  EvaluationReport report = finish_experiment(config, prepared, pre, traces, trajectories);
  write_run_outputs(report, out_dir);
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_flag, int jobs,
            int repeats) {
  if (repeats < 1) throw UsageError("--repeats must be at least 1");
  RunConfig config = load_run_config(config_path, jobs);
  std::string out_dir = pick_out_dir(out_flag, config);
  if (repeats == 1) {
    write_run_outputs(run_experiment(config), out_dir);
    return 0;
  }
  for (int r = 0; r < repeats; ++r) {
    RunConfig repeat_config = config;
    repeat_config.repeat_index = config.repeat_index + r;
    EvaluationReport report = run_experiment(repeat_config);
    fs::path dir = fs::path(out_dir) / ("repeat_" + std::to_string(repeat_config.repeat_index));
    write_run_outputs(report, dir.string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-round ensemble feature selection for network anomaly detection"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string out_train, out_test, out_schema;
  std::string prefilter_path, combined_path, selector;
  std::vector<std::string> trace_paths;
  int jobs = 0;
  int repeats = 1;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file")->required();
  };
  auto add_jobs = [&](CLI::App* cmd) {
    cmd->add_option("--jobs", jobs, "worker thread cap (default: config, else 1)")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic train/test CSV pair");
  add_config(synth);
  synth->add_option("--out-train", out_train, "training CSV path")->required();
  synth->add_option("--out-test", out_test, "test CSV path")->required();
  synth->add_option("--out-schema", out_schema, "also write a schema file here");

  CLI::App* prefilter = app.add_subcommand("prefilter", "run the correlation prefilter stage");
  add_config(prefilter);
  prefilter->add_option("--out", out_path, "prefilter artifact path")->required();

  CLI::App* trace = app.add_subcommand("trace", "run one selector over the prefiltered features");
  add_config(trace);
  trace->add_option("--prefilter", prefilter_path, "prefilter artifact")->required();
  trace->add_option("--selector", selector, "rfe, sbs, univariate or importance")->required();
  trace->add_option("--out", out_path, "trace artifact path")->required();
  add_jobs(trace);

  CLI::App* combine = app.add_subcommand("combine", "combine trace artifacts into candidate sets");
  add_config(combine);
  combine->add_option("--trace", trace_paths, "trace artifact (repeat per selector)")
      ->required();
  combine->add_option("--out", out_path, "combined artifact path")->required();

  CLI::App* evaluate = app.add_subcommand("evaluate", "score combined candidates and write the report");
  add_config(evaluate);
  evaluate->add_option("--prefilter", prefilter_path, "prefilter artifact")->required();
  evaluate->add_option("--combined", combined_path, "combined artifact")->required();
  evaluate->add_option("--out", out_path, "output directory");
  add_jobs(evaluate);

  CLI::App* run = app.add_subcommand("run", "full pipeline: prefilter, trace, combine, evaluate");
  add_config(run);
  run->add_option("--out", out_path, "output directory");
  run->add_option("--repeats", repeats, "re-run with fresh data draws, one subdirectory each")
      ->check(CLI::PositiveNumber);
  add_jobs(run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(config_path, out_train, out_test, out_schema);
    if (prefilter->parsed()) return cmd_prefilter(config_path, out_path);
    if (trace->parsed()) {
      return cmd_trace(config_path, prefilter_path, selector, out_path, jobs);
    }
    if (combine->parsed()) return cmd_combine(config_path, trace_paths, out_path);
    if (evaluate->parsed()) {
      return cmd_evaluate(config_path, prefilter_path, combined_path, out_path, jobs);
    }
    if (run->parsed()) return cmd_run(config_path, out_path, jobs, repeats);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
