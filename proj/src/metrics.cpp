#include "enfs/metrics.hpp"

namespace enfs {

double accuracy_score(const ConfusionMatrix& cm) {
  long long total = cm.total();
  if (total == 0) return 0.0;
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
}

double precision_score(const ConfusionMatrix& cm) {
  long long denom = cm.tp + cm.fp;
  if (denom == 0) return 0.0;
  return static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double recall_score(const ConfusionMatrix& cm) {
  long long denom = cm.tp + cm.fn;
  if (denom == 0) return 0.0;
  return static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double f1_score(const ConfusionMatrix& cm) {
  long long denom = 2 * cm.tp + cm.fp + cm.fn;
  if (denom == 0) return 0.0;
  return static_cast<double>(2 * cm.tp) / static_cast<double>(denom);
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  Metrics m;
  m.cm = cm;
  m.accuracy = accuracy_score(cm);
  m.precision = precision_score(cm);
  m.recall = recall_score(cm);
  m.f1 = f1_score(cm);
  m.degenerate_precision = (cm.tp + cm.fp) == 0;
  m.degenerate_recall = (cm.tp + cm.fn) == 0;
  m.degenerate_f1 = (2 * cm.tp + cm.fp + cm.fn) == 0;
  return m;
}

}  // namespace enfs
