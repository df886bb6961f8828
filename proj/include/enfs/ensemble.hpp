#pragma once

#include "enfs/selectors.hpp"

namespace enfs {

enum class HeuristicKind { Union, Intersection, Quorum };

std::string heuristic_name(HeuristicKind kind);
HeuristicKind heuristic_from_name(const std::string& name);

struct Heuristic {
  HeuristicKind kind = HeuristicKind::Union;
  // Quorum only: minimum number of traces that must retain a feature.
  // 0 selects the default strict majority, floor(k/2)+1 of k traces.
  int quorum_threshold = 0;
};

int effective_quorum_threshold(const Heuristic& h, int n_traces);

// Membership vote over the traces' surviving sets after t eliminations.
// Union keeps features retained by any trace, Intersection by all, Quorum by
// at least the threshold. Intersection and Quorum may come back empty.
FeatureSet combine(const std::vector<EliminationTrace>& traces, int t,
                   const Heuristic& h);

struct EnsembleTrajectory {
  Heuristic heuristic;
  struct Entry {
    int t = 0;
    FeatureSet candidate;
  };
  std::vector<Entry> per_iteration;  // t = 0 .. m-1
};

EnsembleTrajectory build_trajectory(const std::vector<EliminationTrace>& traces,
                                    const Heuristic& h);

// Adds the one-hot block to a candidate. The block must be disjoint from the
// candidate (encoded columns never take part in selection).
FeatureSet augment_with_onehot(const FeatureSet& candidate,
                               const FeatureSet& onehot_block);

}  // namespace enfs
