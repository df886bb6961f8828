#include "enfs/ensemble.hpp"

#include <map>

namespace enfs {

std::string heuristic_name(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::Union: return "union";
    case HeuristicKind::Intersection: return "intersection";
    case HeuristicKind::Quorum: return "quorum";
  }
  return "?";
}

HeuristicKind heuristic_from_name(const std::string& name) {
  if (name == "union") return HeuristicKind::Union;
  if (name == "intersection") return HeuristicKind::Intersection;
  if (name == "quorum") return HeuristicKind::Quorum;
  throw UsageError("unknown heuristic '" + name + "'");
}

int effective_quorum_threshold(const Heuristic& h, int n_traces) {
  if (h.quorum_threshold < 0) {
    throw std::invalid_argument("quorum threshold must not be negative");
  }
  int threshold = h.quorum_threshold > 0 ? h.quorum_threshold : n_traces / 2 + 1;
  if (threshold < 1 || threshold > n_traces) {
    throw std::invalid_argument("quorum threshold " + std::to_string(threshold) +
                                " outside [1, " + std::to_string(n_traces) + "]");
  }
  return threshold;
}

FeatureSet combine(const std::vector<EliminationTrace>& traces, int t,
                   const Heuristic& h) {
  if (traces.empty()) throw std::invalid_argument("combine: no traces");
  const FeatureSet& start = traces.front().start_set;
  for (const auto& trace : traces) {
    if (!(trace.start_set == start)) {
      throw std::invalid_argument("combine: traces disagree on the start set");
    }
  }
  if (t < 0 || t > start.size() - 1) {
    throw std::invalid_argument("combine: iteration " + std::to_string(t) +
                                " outside [0, " + std::to_string(start.size() - 1) +
                                "]");
  }

  int k = static_cast<int>(traces.size());
  int needed;
  switch (h.kind) {
    case HeuristicKind::Union: needed = 1; break;
    case HeuristicKind::Intersection: needed = k; break;
    case HeuristicKind::Quorum: needed = effective_quorum_threshold(h, k); break;
    default: throw std::invalid_argument("combine: bad heuristic");
  }

  std::map<int, int> votes;
  for (const auto& trace : traces) {
    for (int id : trace.surviving_set(t)) ++votes[id];
  }
  std::vector<int> ids;
  for (const auto& [id, count] : votes) {
    if (count >= needed) ids.push_back(id);
  }
  return FeatureSet(std::move(ids));
}

EnsembleTrajectory build_trajectory(const std::vector<EliminationTrace>& traces,
                                    const Heuristic& h) {
  if (traces.empty()) throw std::invalid_argument("build_trajectory: no traces");
  EnsembleTrajectory trajectory;
  trajectory.heuristic = h;
  int m = traces.front().start_set.size();
  trajectory.per_iteration.reserve(static_cast<std::size_t>(m));
  for (int t = 0; t < m; ++t) {
    trajectory.per_iteration.push_back({t, combine(traces, t, h)});
  }
  return trajectory;
}

FeatureSet augment_with_onehot(const FeatureSet& candidate,
                               const FeatureSet& onehot_block) {
  FeatureSet overlap = candidate.intersect(onehot_block);
  if (!overlap.empty()) {
    throw std::invalid_argument("augment_with_onehot: candidate already contains id " +
                                std::to_string(overlap.ids().front()));
  }
  return candidate.unite(onehot_block);
}

}  // namespace enfs
