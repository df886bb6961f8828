#pragma once

#include <span>

#include "enfs/learners.hpp"
#include "enfs/metrics.hpp"

namespace enfs {

enum class SelectorKind { Rfe, Sbs, Univariate, Importance };

std::string selector_name(SelectorKind kind);
SelectorKind selector_from_name(const std::string& name);

// Record of one selector's run: starting from start_set, it eliminates one
// feature per iteration until a single survivor remains. order holds the
// eliminated ids first-to-last; scores holds the per-iteration diagnostic
// (the eliminated feature's score, or for SBS the winning criterion value).
struct EliminationTrace {
  SelectorKind selector = SelectorKind::Univariate;
  FeatureSet start_set;
  std::vector<int> order;
  std::vector<double> scores;
  uint64_t seed = 0;

  // Features still alive after t eliminations; t in [0, start_set.size()-1].
  FeatureSet surviving_set(int t) const;
  int iterations() const { return static_cast<int>(order.size()); }

  // Contract check: order entries are distinct members of start_set, exactly
  // m-1 of them, with scores aligned.
  void validate() const;
};

double pearson_corr(std::span<const double> x, std::span<const double> y);

struct CorrelationReport {
  double threshold = 0.0;
  FeatureSet kept;
  struct Dropped {
    int id;        // dropped column
    int partner;   // kept lower-id column it correlated with
    double abs_corr;
  };
  std::vector<Dropped> dropped;
};

// Round-1 redundancy filter over the numeric columns: scan unordered pairs
// (i, j), i < j, in ascending id order and drop j the first time
// |corr(i, j)| exceeds the threshold. Dropped columns leave the scan.
CorrelationReport correlation_prefilter(const Dataset& d, double threshold);

// Chi-square association between a nonnegative feature column and the binary
// labels. Per-class observed mass is the column sum over that class; expected
// mass is the total column sum times the class prior.
double chi_square_score(std::span<const double> x, const std::vector<int>& labels);

// Filter selector: score every feature once, then eliminate in ascending
// score order (ties toward the lower id).
EliminationTrace univariate_trace(const Dataset& d, const FeatureSet& features);

// Recursive feature elimination: retrain logistic regression on the survivors
// each iteration and drop the feature with the smallest |coefficient|.
EliminationTrace rfe_trace(const Dataset& d, const FeatureSet& features,
                           uint64_t seed, const LogRegConfig& config = {});

struct SbsConfig {
  int cv_folds = 3;
  ForestConfig learner{.n_trees = 25};
};

struct SbsCostLog {
  std::vector<long long> models_per_iteration;
};

// Sequential backward selection: per iteration, for every surviving feature
// f, score surviving-minus-f by mean F1 over stratified CV with the criterion
// learner, then eliminate the f whose removal scored highest. Trains exactly
// |surviving| * cv_folds criterion models per iteration (recorded in cost).
EliminationTrace sbs_trace(const Dataset& d, const FeatureSet& features,
                           uint64_t seed, const SbsConfig& config = {},
                           int jobs = 1, SbsCostLog* cost = nullptr);

// Embedded selector: retrain a forest on the survivors each iteration and
// drop the feature with the smallest Gini importance.
EliminationTrace importance_trace(const Dataset& d, const FeatureSet& features,
                                  uint64_t seed, const ForestConfig& config = {},
                                  int jobs = 1);

}  // namespace enfs
