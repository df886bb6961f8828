#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "enfs/dataset.hpp"

namespace enfs {

struct LogRegConfig {
  double learning_rate = 0.1;
  int iterations = 500;
  double l2 = 1e-4;
  uint64_t seed = 0;  // reserved; full-batch descent draws no random numbers
};

// Binary logistic regression trained with full-batch gradient descent from a
// zero initial state. Weights align with feature_ids (sorted feature subset).
struct LogRegModel {
  std::vector<int> feature_ids;
  std::vector<double> weights;
  double bias = 0.0;
  LogRegConfig config;
  // Regularized mean loss before each update plus a final entry; recorded so
  // callers can check that descent never increases the loss.
  std::vector<double> loss_history;
};

LogRegModel train_logreg(const Dataset& d, const FeatureSet& features,
                         const LogRegConfig& config = {});

std::vector<double> predict_proba(const LogRegModel& model, const Dataset& d,
                                  const FeatureSet& features);
std::vector<int> predict(const LogRegModel& model, const Dataset& d,
                         const FeatureSet& features);

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 12;
  int min_samples_split = 2;
  // 0 means ceil(sqrt(m)) features examined per split.
  int feature_subsample = 0;
  uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // index into the model's feature_ids; -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int count0 = 0;
  int count1 = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

// Random forest of CART trees: bootstrap the rows per tree, subsample
// features per split, greedily minimize weighted Gini impurity. Per-tree
// seeds derive from config.seed and the tree index, so results do not depend
// on how tree construction is scheduled.
struct ForestModel {
  std::vector<int> feature_ids;
  std::vector<Tree> trees;
  // Mean impurity decrease per feature, weighted by node sample fraction and
  // normalized to sum to 1 (all zero when no split occurred anywhere).
  std::vector<double> importances;
  ForestConfig config;
};

ForestModel train_random_forest(const Dataset& d, const FeatureSet& features,
                                const ForestConfig& config = {}, int jobs = 1);

// Majority vote over trees; an exact tie votes anomaly.
std::vector<int> predict(const ForestModel& model, const Dataset& d,
                         const FeatureSet& features);

struct ConfusionMatrix {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;
  long long total() const { return tp + fp + fn + tn; }
};

// Counts with label 1 (anomaly) as the positive class.
ConfusionMatrix confusion(const std::vector<int>& truth,
                          const std::vector<int>& predicted);

// Binary Gini impurity 2p(1-p) for an anomaly fraction p in [0,1].
double gini_impurity(double p);

// Learner selection shared by the evaluation harness and the CLI roster.
struct LearnerConfig {
  enum class Kind { LogReg, Forest };
  Kind kind = Kind::Forest;
  LogRegConfig logreg;
  ForestConfig forest;
  std::string name() const { return kind == Kind::LogReg ? "lr" : "rf"; }
};

// One-way JSON serialization for run reports ("model_version" tags the layout).
std::string to_json_string(const LogRegModel& model);
std::string to_json_string(const ForestModel& model);

}  // namespace enfs
