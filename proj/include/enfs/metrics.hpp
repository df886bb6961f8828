#pragma once

#include "enfs/learners.hpp"

namespace enfs {

// Classification rates with anomaly (label 1) as the positive class. A zero
// denominator yields 0 and sets the matching degenerate flag.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionMatrix cm;
  bool degenerate_precision = false;
  bool degenerate_recall = false;
  bool degenerate_f1 = false;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
};

double accuracy_score(const ConfusionMatrix& cm);
double precision_score(const ConfusionMatrix& cm);
double recall_score(const ConfusionMatrix& cm);

// 2*tp / (2*tp + fp + fn), the harmonic mean of precision and recall.
double f1_score(const ConfusionMatrix& cm);

Metrics compute_metrics(const ConfusionMatrix& cm);

}  // namespace enfs
