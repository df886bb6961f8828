#include "enfs/learners.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace enfs {

namespace {

void check_features(const Dataset& d, const FeatureSet& features, const char* who) {
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

void check_subset_matches(const std::vector<int>& model_ids, const FeatureSet& features,
                          const char* who) {
  if (features.ids() != model_ids) {
    throw std::invalid_argument(std::string(who) +
                                ": feature subset differs from the one the model "
                                "was trained on");
  }
}

double mean_loss(const Dataset& d, const std::vector<int>& ids,
                 const std::vector<double>& w, double b, double l2) {
  double loss = 0.0;
  for (int i = 0; i < d.n_rows(); ++i) {
    std::span<const double> row = d.row(i);
    double z = b;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      z += w[j] * row[static_cast<std::size_t>(ids[j])];
    }
    double y = static_cast<double>(d.label(i));
    loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
  }
  double wsq = 0.0;
  for (double v : w) wsq += v * v;
  return loss / d.n_rows() + 0.5 * l2 * wsq;
}

}  // namespace

LogRegModel train_logreg(const Dataset& d, const FeatureSet& features,
                         const LogRegConfig& config) {
  check_features(d, features, "train_logreg");
  if (config.learning_rate <= 0.0) {
    throw std::invalid_argument("train_logreg: learning_rate must be positive");
  }
  if (config.iterations < 0) {
    throw std::invalid_argument("train_logreg: negative iteration count");
  }
  if (config.l2 < 0.0) throw std::invalid_argument("train_logreg: negative l2");
  int anomalies = d.anomaly_count();
  if (anomalies == 0 || anomalies == d.n_rows()) {
    throw DataError("train_logreg: training data contains a single class");
  }

  const std::vector<int>& ids = features.ids();
  const std::size_t m = ids.size();
  const int n = d.n_rows();

  LogRegModel model;
  model.feature_ids = ids;
  model.weights.assign(m, 0.0);
  model.bias = 0.0;
  model.config = config;
  model.loss_history.reserve(static_cast<std::size_t>(config.iterations) + 1);

  std::vector<double> grad(m);
  for (int iter = 0; iter < config.iterations; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
      std::span<const double> row = d.row(i);
      double z = model.bias;
      for (std::size_t j = 0; j < m; ++j) {
        z += model.weights[j] * row[static_cast<std::size_t>(ids[j])];
      }
      double y = static_cast<double>(d.label(i));
      loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
      double p = 1.0 / (1.0 + std::exp(-z));
      double e = p - y;
      for (std::size_t j = 0; j < m; ++j) {
        grad[j] += e * row[static_cast<std::size_t>(ids[j])];
      }
      grad_b += e;
    }
    double wsq = 0.0;
    for (double v : model.weights) wsq += v * v;
    model.loss_history.push_back(loss / n + 0.5 * config.l2 * wsq);

    for (std::size_t j = 0; j < m; ++j) {
      model.weights[j] -= config.learning_rate * (grad[j] / n + config.l2 * model.weights[j]);
    }
    model.bias -= config.learning_rate * grad_b / n;
  }
  model.loss_history.push_back(mean_loss(d, ids, model.weights, model.bias, config.l2));
  return model;
}

std::vector<double> predict_proba(const LogRegModel& model, const Dataset& d,
                                  const FeatureSet& features) {
  check_features(d, features, "predict");
  check_subset_matches(model.feature_ids, features, "predict");
  std::vector<double> proba(static_cast<std::size_t>(d.n_rows()));
  for (int i = 0; i < d.n_rows(); ++i) {
    std::span<const double> row = d.row(i);
    double z = model.bias;
    for (std::size_t j = 0; j < model.feature_ids.size(); ++j) {
      z += model.weights[j] * row[static_cast<std::size_t>(model.feature_ids[j])];
    }
    proba[static_cast<std::size_t>(i)] = 1.0 / (1.0 + std::exp(-z));
  }
  return proba;
}

std::vector<int> predict(const LogRegModel& model, const Dataset& d,
                         const FeatureSet& features) {
  std::vector<double> proba = predict_proba(model, d, features);
  std::vector<int> labels(proba.size());
  for (std::size_t i = 0; i < proba.size(); ++i) {
    // Probability exactly 0.5 votes anomaly.
    labels[i] = proba[i] >= 0.5 ? 1 : 0;
  }
  return labels;
}

double gini_impurity(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("gini_impurity: fraction outside [0,1]");
  }
  return 2.0 * p * (1.0 - p);
}

namespace {

double gini_counts(long long c0, long long c1) {
  long long n = c0 + c1;
  if (n == 0) return 0.0;
  double p = static_cast<double>(c1) / static_cast<double>(n);
  return 2.0 * p * (1.0 - p);
}

struct TreeBuilder {
  const Dataset& d;
  const std::vector<int>& ids;
  const ForestConfig& cfg;
  int subsample;
  int n_boot;
  Rng rng;
  Tree tree;
  std::vector<double> importance;  // aligned with ids

  TreeBuilder(const Dataset& data, const std::vector<int>& feature_ids,
              const ForestConfig& config, int feats_per_split, int bootstrap_size,
              uint64_t seed)
      : d(data),
        ids(feature_ids),
        cfg(config),
        subsample(feats_per_split),
        n_boot(bootstrap_size),
        rng(seed),
        importance(feature_ids.size(), 0.0) {}

  int build(std::vector<int>& samples, int depth) {
    int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    long long c0 = 0;
    long long c1 = 0;
    for (int r : samples) {
      if (d.label(r) == 1) ++c1; else ++c0;
    }
    tree.nodes[static_cast<std::size_t>(node_index)].count0 = static_cast<int>(c0);
    tree.nodes[static_cast<std::size_t>(node_index)].count1 = static_cast<int>(c1);

    int n_node = static_cast<int>(samples.size());
    if (depth >= cfg.max_depth || c0 == 0 || c1 == 0 ||
        n_node < cfg.min_samples_split) {
      return node_index;
    }

    // Draw the per-split feature subset, then examine it in ascending feature
    // id order so equal gains resolve to the lower id and lower threshold.
    std::vector<int> pool(ids.size());
    for (std::size_t j = 0; j < ids.size(); ++j) pool[j] = static_cast<int>(j);
    int take = std::min<int>(subsample, static_cast<int>(pool.size()));
    for (int j = 0; j < take; ++j) {
      int swap_with = j + rng.next_below(static_cast<int>(pool.size()) - j);
      std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(swap_with)]);
    }
    pool.resize(static_cast<std::size_t>(take));
    std::sort(pool.begin(), pool.end());

    double parent_gini = gini_counts(c0, c1);
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, int>> ordered(samples.size());
    for (int fj : pool) {
      int col = ids[static_cast<std::size_t>(fj)];
      for (std::size_t k = 0; k < samples.size(); ++k) {
        ordered[k] = {d.at(samples[k], col), d.label(samples[k])};
      }
      std::sort(ordered.begin(), ordered.end());

      long long left0 = 0;
      long long left1 = 0;
      for (std::size_t t = 0; t + 1 < ordered.size(); ++t) {
        if (ordered[t].second == 1) ++left1; else ++left0;
        if (ordered[t].first == ordered[t + 1].first) continue;
        long long right0 = c0 - left0;
        long long right1 = c1 - left1;
        double nl = static_cast<double>(left0 + left1);
        double nr = static_cast<double>(right0 + right1);
        double weighted = (nl * gini_counts(left0, left1) +
                           nr * gini_counts(right0, right1)) /
                          static_cast<double>(n_node);
        double gain = parent_gini - weighted;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = fj;
          best_threshold = ordered[t].first;  // left branch takes x <= threshold
        }
      }
    }

    if (best_feature < 0 || best_gain <= 1e-12) return node_index;

    importance[static_cast<std::size_t>(best_feature)] +=
        (static_cast<double>(n_node) / static_cast<double>(n_boot)) * best_gain;

    int col = ids[static_cast<std::size_t>(best_feature)];
    std::vector<int> left;
    std::vector<int> right;
    left.reserve(samples.size());
    right.reserve(samples.size());
    for (int r : samples) {
      if (d.at(r, col) <= best_threshold) left.push_back(r); else right.push_back(r);
    }
    samples.clear();
    samples.shrink_to_fit();

    int left_index = build(left, depth + 1);
    int right_index = build(right, depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left_index;
    node.right = right_index;
    return node_index;
  }
};

int tree_predict(const Tree& tree, std::span<const double> row,
                 const std::vector<int>& ids) {
  int node = 0;
  for (;;) {
    const TreeNode& t = tree.nodes[static_cast<std::size_t>(node)];
    if (t.feature < 0) return t.count1 >= t.count0 ? 1 : 0;
    double v = row[static_cast<std::size_t>(ids[static_cast<std::size_t>(t.feature)])];
    node = v <= t.threshold ? t.left : t.right;
  }
}

}  // namespace

ForestModel train_random_forest(const Dataset& d, const FeatureSet& features,
                                const ForestConfig& config, int jobs) {
  check_features(d, features, "train_random_forest");
  if (config.n_trees < 1) {
    throw std::invalid_argument("train_random_forest: n_trees must be >= 1");
  }
  if (config.max_depth < 1) {
    throw std::invalid_argument("train_random_forest: max_depth must be >= 1");
  }

  const std::vector<int>& ids = features.ids();
  int m = static_cast<int>(ids.size());
  int subsample = config.feature_subsample > 0
                      ? std::min(config.feature_subsample, m)
                      : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m))));
  int n = d.n_rows();

  ForestModel model;
  model.feature_ids = ids;
  model.config = config;
  model.trees.resize(static_cast<std::size_t>(config.n_trees));
  std::vector<std::vector<double>> per_tree_importance(
      static_cast<std::size_t>(config.n_trees));

  parallel_for(static_cast<std::size_t>(config.n_trees), jobs, [&](std::size_t t) {
    TreeBuilder builder(d, ids, config, subsample, n,
                        seed_mix(config.seed, static_cast<uint64_t>(t)));
    std::vector<int> samples(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      samples[static_cast<std::size_t>(i)] = builder.rng.next_below(n);
    }
    builder.build(samples, 0);
    model.trees[t] = std::move(builder.tree);
    per_tree_importance[t] = std::move(builder.importance);
  });

  // Reduce in tree order so parallel construction cannot perturb the sums.
  model.importances.assign(ids.size(), 0.0);
  for (const auto& imp : per_tree_importance) {
    for (std::size_t j = 0; j < imp.size(); ++j) model.importances[j] += imp[j];
  }
  double total = 0.0;
  for (double v : model.importances) total += v;
  if (total > 0.0) {
    for (double& v : model.importances) v /= total;
  }
  return model;
}

std::vector<int> predict(const ForestModel& model, const Dataset& d,
                         const FeatureSet& features) {
  check_features(d, features, "predict");
  check_subset_matches(model.feature_ids, features, "predict");
  std::vector<int> labels(static_cast<std::size_t>(d.n_rows()));
  int n_trees = static_cast<int>(model.trees.size());
  for (int i = 0; i < d.n_rows(); ++i) {
    std::span<const double> row = d.row(i);
    int votes = 0;
    for (const Tree& tree : model.trees) {
      votes += tree_predict(tree, row, model.feature_ids);
    }
    labels[static_cast<std::size_t>(i)] = (2 * votes >= n_trees) ? 1 : 0;
  }
  return labels;
}

ConfusionMatrix confusion(const std::vector<int>& truth,
                          const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("confusion: length mismatch");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if ((truth[i] != 0 && truth[i] != 1) || (predicted[i] != 0 && predicted[i] != 1)) {
      throw std::invalid_argument("confusion: labels must be 0 or 1");
    }
    if (truth[i] == 1) {
      if (predicted[i] == 1) ++cm.tp; else ++cm.fn;
    } else {
      if (predicted[i] == 1) ++cm.fp; else ++cm.tn;
    }
  }
  return cm;
}

std::string to_json_string(const LogRegModel& model) {
  nlohmann::json j;
  j["model_version"] = 1;
  j["kind"] = "logreg";
  j["feature_ids"] = model.feature_ids;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["config"] = {{"learning_rate", model.config.learning_rate},
                 {"iterations", model.config.iterations},
                 {"l2", model.config.l2},
                 {"seed", model.config.seed}};
  j["final_loss"] = model.loss_history.empty() ? 0.0 : model.loss_history.back();
  return j.dump();
}

std::string to_json_string(const ForestModel& model) {
  nlohmann::json j;
  j["model_version"] = 1;
  j["kind"] = "forest";
  j["feature_ids"] = model.feature_ids;
  j["importances"] = model.importances;
  j["config"] = {{"n_trees", model.config.n_trees},
                 {"max_depth", model.config.max_depth},
                 {"min_samples_split", model.config.min_samples_split},
                 {"feature_subsample", model.config.feature_subsample},
                 {"seed", model.config.seed}};
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& tree : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& t : tree.nodes) {
      nodes.push_back({{"f", t.feature},
                       {"thr", t.threshold},
                       {"l", t.left},
                       {"r", t.right},
                       {"c0", t.count0},
                       {"c1", t.count1}});
    }
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j.dump();
}

}  // namespace enfs
