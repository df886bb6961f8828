#pragma once

#include <string>

#include "enfs/evaluation.hpp"

namespace enfs {

std::string hex_u64(uint64_t v);
uint64_t parse_hex_u64(const std::string& s);

// Stage artifacts. Each one is a JSON document carrying a stage's output plus
// the fingerprint of the dataset it was computed from, so a later stage can
// refuse inputs that belong to different data. Parsers throw DataError on
// malformed or mismatched documents.
std::string prefilter_to_json(const CorrelationReport& report, uint64_t fingerprint);
CorrelationReport prefilter_from_json(const std::string& text, uint64_t* fingerprint);

// The standalone trace artifact echoes the run config so the file documents
// the hyperparameters the selector ran with; the parser ignores the echo.
std::string trace_to_json(const EliminationTrace& trace, uint64_t fingerprint,
                          const RunConfig& config);
EliminationTrace trace_from_json(const std::string& text, uint64_t* fingerprint);

// The combine stage's output bundles the traces with the trajectories built
// from them, so the evaluate stage needs no separate trace inputs.
std::string combined_to_json(const std::vector<EliminationTrace>& traces,
                             const std::vector<EnsembleTrajectory>& trajectories,
                             uint64_t fingerprint);
void combined_from_json(const std::string& text, std::vector<EliminationTrace>* traces,
                        std::vector<EnsembleTrajectory>* trajectories,
                        uint64_t* fingerprint);

// Run outputs. report_to_json includes wall-clock timings; the canonical form
// zeroes them, and is what determinism comparisons and the manifest digest
// use. manifest_to_json echoes the full config (defaults included) with the
// data provenance, so a report is self-describing.
std::string report_to_json(const EvaluationReport& report);
std::string canonical_report_json(const EvaluationReport& report);
std::string manifest_to_json(const EvaluationReport& report);

std::string cv_curves_csv(const EvaluationReport& report);
std::string heuristic_curves_csv(const EvaluationReport& report);
// Candidate sets per (heuristic, iteration) with comma-joined feature names,
// for plotting tools that want names rather than ids.
std::string trajectories_csv(const EvaluationReport& report);
std::string timing_csv(const EvaluationReport& report);

// Writes through a temp file in the same directory plus an atomic rename, so
// a failed run never leaves a partial output behind. Creates parent
// directories as needed.
void atomic_write(const std::string& path, const std::string& content);

// Writes report.json, manifest.json, cv_curves.csv, heuristic_curves.csv,
// trajectories.csv and timing.csv into out_dir.
void write_run_outputs(const EvaluationReport& report, const std::string& out_dir);

}  // namespace enfs
