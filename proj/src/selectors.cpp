#include "enfs/selectors.hpp"

#include <algorithm>
#include <cmath>

namespace enfs {

std::string selector_name(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::Rfe: return "rfe";
    case SelectorKind::Sbs: return "sbs";
    case SelectorKind::Univariate: return "univariate";
    case SelectorKind::Importance: return "importance";
  }
  return "?";
}

SelectorKind selector_from_name(const std::string& name) {
  if (name == "rfe") return SelectorKind::Rfe;
  if (name == "sbs") return SelectorKind::Sbs;
  if (name == "univariate") return SelectorKind::Univariate;
  if (name == "importance") return SelectorKind::Importance;
  throw UsageError("unknown selector '" + name + "'");
}

FeatureSet EliminationTrace::surviving_set(int t) const {
  if (t < 0 || t > static_cast<int>(order.size())) {
    throw std::invalid_argument("surviving_set: iteration " + std::to_string(t) +
                                " out of range");
  }
  FeatureSet s = start_set;
  for (int i = 0; i < t; ++i) s.erase(order[static_cast<std::size_t>(i)]);
  return s;
}

void EliminationTrace::validate() const {
  if (start_set.empty()) {
    throw std::invalid_argument("trace: empty start set");
  }
  if (static_cast<int>(order.size()) != start_set.size() - 1) {
    throw std::invalid_argument("trace: expected " +
                                std::to_string(start_set.size() - 1) +
                                " eliminations, have " + std::to_string(order.size()));
  }
  if (scores.size() != order.size()) {
    throw std::invalid_argument("trace: scores not aligned with eliminations");
  }
  FeatureSet seen;
  for (int id : order) {
    if (!start_set.contains(id)) {
      throw std::invalid_argument("trace: eliminated id " + std::to_string(id) +
                                  " not in the start set");
    }
    if (seen.contains(id)) {
      throw std::invalid_argument("trace: id " + std::to_string(id) +
                                  " eliminated twice");
    }
    seen.insert(id);
  }
}

double pearson_corr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson_corr: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson_corr: need at least 2 values");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::invalid_argument("pearson_corr: constant input");
  }
  return sxy / std::sqrt(sxx * syy);
}

CorrelationReport correlation_prefilter(const Dataset& d, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("correlation_prefilter: threshold must be in (0,1]");
  }
  FeatureSet numeric = d.features_of_kind(ColumnKind::Numeric);
  const std::vector<int>& ids = numeric.ids();
  const int n = d.n_rows();

  // Center the columns once; correlation then reduces to dot products.
  std::vector<std::vector<double>> centered(ids.size());
  std::vector<double> norms(ids.size());
  for (std::size_t a = 0; a < ids.size(); ++a) {
    std::vector<double> col = d.column_values(ids[a]);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(n);
    double sq = 0.0;
    for (double& v : col) {
      v -= mean;
      sq += v * v;
    }
    if (sq == 0.0) {
      throw std::invalid_argument("correlation_prefilter: column '" +
                                  d.column(ids[a]).name +
                                  "' is constant; drop it before filtering");
    }
    centered[a] = std::move(col);
    norms[a] = std::sqrt(sq);
  }

  CorrelationReport report;
  report.threshold = threshold;
  std::vector<bool> kept(ids.size(), true);
  for (std::size_t a = 0; a < ids.size(); ++a) {
    if (!kept[a]) continue;
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      if (!kept[b]) continue;
      double dot = 0.0;
      const double* xa = centered[a].data();
      const double* xb = centered[b].data();
      for (int i = 0; i < n; ++i) dot += xa[i] * xb[i];
      double r = std::abs(dot / (norms[a] * norms[b]));
      if (r > threshold) {
        kept[b] = false;
        report.dropped.push_back({ids[b], ids[a], r});
      }
    }
  }
  std::vector<int> kept_ids;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    if (kept[a]) kept_ids.push_back(ids[a]);
  }
  report.kept = FeatureSet(std::move(kept_ids));
  return report;
}

double chi_square_score(std::span<const double> x, const std::vector<int>& labels) {
  if (x.size() != labels.size()) {
    throw std::invalid_argument("chi_square_score: length mismatch");
  }
  if (x.empty()) throw std::invalid_argument("chi_square_score: empty input");
  double total = 0.0;
  double observed1 = 0.0;
  long long n1 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0) {
      throw std::invalid_argument("chi_square_score: negative value at row " +
                                  std::to_string(i));
    }
    if (labels[i] != 0 && labels[i] != 1) {
      throw std::invalid_argument("chi_square_score: labels must be 0 or 1");
    }
    total += x[i];
    if (labels[i] == 1) {
      observed1 += x[i];
      ++n1;
    }
  }
  if (total == 0.0) {
    throw std::invalid_argument("chi_square_score: all-zero column");
  }
  long long n = static_cast<long long>(x.size());
  if (n1 == 0 || n1 == n) {
    throw std::invalid_argument("chi_square_score: labels contain a single class");
  }
  double p1 = static_cast<double>(n1) / static_cast<double>(n);
  double expected1 = total * p1;
  double expected0 = total * (1.0 - p1);
  double observed0 = total - observed1;
  double d1 = observed1 - expected1;
  double d0 = observed0 - expected0;
  return d1 * d1 / expected1 + d0 * d0 / expected0;
}

namespace {

void check_trace_inputs(const Dataset& d, const FeatureSet& features, const char* who) {
  if (features.empty()) {
    throw std::invalid_argument(std::string(who) + ": empty feature set");
  }
  for (int id : features) {
    if (id < 0 || id >= d.n_cols()) {
      throw std::invalid_argument(std::string(who) + ": feature id " +
                                  std::to_string(id) + " out of range");
    }
  }
}

}  // namespace

EliminationTrace univariate_trace(const Dataset& d, const FeatureSet& features) {
  check_trace_inputs(d, features, "univariate_trace");

  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(static_cast<std::size_t>(features.size()));
  for (int id : features) {
    std::vector<double> col = d.column_values(id);
    ranked.emplace_back(chi_square_score(col, d.labels()), id);
  }
  // Ascending score; equal scores fall to the lower id first.
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });

  EliminationTrace trace;
  trace.selector = SelectorKind::Univariate;
  trace.start_set = features;
  trace.seed = 0;
  for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
    trace.order.push_back(ranked[i].second);
    trace.scores.push_back(ranked[i].first);
  }
  trace.validate();
  return trace;
}

EliminationTrace rfe_trace(const Dataset& d, const FeatureSet& features,
                           uint64_t seed, const LogRegConfig& config) {
  check_trace_inputs(d, features, "rfe_trace");

  EliminationTrace trace;
  trace.selector = SelectorKind::Rfe;
  trace.start_set = features;
  trace.seed = seed;

  FeatureSet surviving = features;
  int iter = 0;
  while (surviving.size() > 1) {
    LogRegConfig cfg = config;
    cfg.seed = seed_mix(seed, static_cast<uint64_t>(iter));
    LogRegModel model = train_logreg(d, surviving, cfg);

    int worst = -1;
    double worst_mag = 0.0;
    for (std::size_t j = 0; j < model.feature_ids.size(); ++j) {
      double mag = std::abs(model.weights[j]);
      if (worst < 0 || mag < worst_mag) {
        worst = model.feature_ids[j];
        worst_mag = mag;
      }
    }
    trace.order.push_back(worst);
    trace.scores.push_back(worst_mag);
    surviving.erase(worst);
    ++iter;
  }
  trace.validate();
  return trace;
}

EliminationTrace sbs_trace(const Dataset& d, const FeatureSet& features,
                           uint64_t seed, const SbsConfig& config, int jobs,
                           SbsCostLog* cost) {
  check_trace_inputs(d, features, "sbs_trace");
  if (config.cv_folds < 2) {
    throw std::invalid_argument("sbs_trace: cv_folds must be at least 2");
  }

  EliminationTrace trace;
  trace.selector = SelectorKind::Sbs;
  trace.start_set = features;
  trace.seed = seed;
  if (cost != nullptr) cost->models_per_iteration.clear();

  FeatureSet surviving = features;
  int iter = 0;
  while (surviving.size() > 1) {
    FoldPlan plan = stratified_kfold(
        d, config.cv_folds, seed_mix(seed_mix(seed, "sbs-folds"), static_cast<uint64_t>(iter)));

    // The fold split is shared by every candidate in this iteration.
    std::vector<Dataset> fold_train;
    std::vector<Dataset> fold_test;
    fold_train.reserve(static_cast<std::size_t>(plan.k));
    fold_test.reserve(static_cast<std::size_t>(plan.k));
    for (int f = 0; f < plan.k; ++f) {
      std::vector<int> train_rows;
      std::vector<int> test_rows;
      for (int i = 0; i < d.n_rows(); ++i) {
        if (plan.assignments[static_cast<std::size_t>(i)] == f) {
          test_rows.push_back(i);
        } else {
          train_rows.push_back(i);
        }
      }
      fold_train.push_back(d.subset_rows(train_rows));
      fold_test.push_back(d.subset_rows(test_rows));
    }

    std::vector<int> candidates = surviving.ids();
    std::vector<double> criterion(candidates.size(), 0.0);
    parallel_for(candidates.size(), jobs, [&](std::size_t c) {
      FeatureSet without = surviving;
      without.erase(candidates[c]);
      double f1_sum = 0.0;
      for (int f = 0; f < plan.k; ++f) {
        ForestConfig fc = config.learner;
        fc.seed = seed_mix(seed_mix(seed_mix(seed, static_cast<uint64_t>(iter)),
                                    static_cast<uint64_t>(candidates[c])),
                           static_cast<uint64_t>(f));
        ForestModel model = train_random_forest(fold_train[static_cast<std::size_t>(f)],
                                                without, fc, 1);
        std::vector<int> pred =
            predict(model, fold_test[static_cast<std::size_t>(f)], without);
        f1_sum += f1_score(
            confusion(fold_test[static_cast<std::size_t>(f)].labels(), pred));
      }
      criterion[c] = f1_sum / plan.k;
    });

    // Removal that leaves the best criterion wins; ties fall to the lower id.
    std::size_t best = 0;
    for (std::size_t c = 1; c < candidates.size(); ++c) {
      if (criterion[c] > criterion[best]) best = c;
    }
    trace.order.push_back(candidates[best]);
    trace.scores.push_back(criterion[best]);
    surviving.erase(candidates[best]);
    if (cost != nullptr) {
      cost->models_per_iteration.push_back(
          static_cast<long long>(candidates.size()) * plan.k);
    }
    ++iter;
  }
  trace.validate();
  return trace;
}

EliminationTrace importance_trace(const Dataset& d, const FeatureSet& features,
                                  uint64_t seed, const ForestConfig& config,
                                  int jobs) {
  check_trace_inputs(d, features, "importance_trace");

  EliminationTrace trace;
  trace.selector = SelectorKind::Importance;
  trace.start_set = features;
  trace.seed = seed;

  FeatureSet surviving = features;
  int iter = 0;
  while (surviving.size() > 1) {
    ForestConfig cfg = config;
    cfg.seed = seed_mix(seed, static_cast<uint64_t>(iter));
    ForestModel model = train_random_forest(d, surviving, cfg, jobs);

    int worst = -1;
    double worst_importance = 0.0;
    for (std::size_t j = 0; j < model.feature_ids.size(); ++j) {
      if (worst < 0 || model.importances[j] < worst_importance) {
        worst = model.feature_ids[j];
        worst_importance = model.importances[j];
      }
    }
    trace.order.push_back(worst);
    trace.scores.push_back(worst_importance);
    surviving.erase(worst);
    ++iter;
  }
  trace.validate();
  return trace;
}

}  // namespace enfs
