#include <doctest.h>

#include <random>
#include <set>

#include "enfs/ensemble.hpp"
#include "util.hpp"

using namespace enfs;

namespace {

EliminationTrace trace_of(std::vector<int> start, std::vector<int> order) {
  EliminationTrace t;
  t.start_set = FeatureSet(std::move(start));
  t.scores.assign(order.size(), 0.0);
  t.order = std::move(order);
  t.validate();
  return t;
}

FeatureSet from_std(const std::set<int>& s) {
  return FeatureSet(std::vector<int>(s.begin(), s.end()));
}

}  // namespace

TEST_CASE("combining four partially agreeing traces") {
  // ids 0..4; after two eliminations the four survivor sets are
  // {0,1,2}, {0,1,3}, {0,2,3}, {0,1,4}
  std::vector<int> start = {0, 1, 2, 3, 4};
  std::vector<EliminationTrace> traces = {
      trace_of(start, {3, 4, 1, 2}),
      trace_of(start, {2, 4, 0, 1}),
      trace_of(start, {1, 4, 2, 3}),
      trace_of(start, {2, 3, 0, 1}),
  };
  REQUIRE(traces[0].surviving_set(2) == FeatureSet{0, 1, 2});
  REQUIRE(traces[1].surviving_set(2) == FeatureSet{0, 1, 3});
  REQUIRE(traces[2].surviving_set(2) == FeatureSet{0, 2, 3});
  REQUIRE(traces[3].surviving_set(2) == FeatureSet{0, 1, 4});

  CHECK(combine(traces, 2, {HeuristicKind::Union}) == FeatureSet{0, 1, 2, 3, 4});
  CHECK(combine(traces, 2, {HeuristicKind::Intersection}) == FeatureSet{0});
  CHECK(combine(traces, 2, {HeuristicKind::Quorum, 3}) == FeatureSet{0, 1});
  // default strict majority of 4 traces is also 3
  CHECK(combine(traces, 2, {HeuristicKind::Quorum}) == FeatureSet{0, 1});
}

TEST_CASE("heuristics coincide on a single trace or identical traces") {
  std::vector<EliminationTrace> one = {trace_of({1, 5, 9}, {5, 9})};
  for (HeuristicKind kind :
       {HeuristicKind::Union, HeuristicKind::Intersection, HeuristicKind::Quorum}) {
    CHECK(combine(one, 1, {kind}) == FeatureSet{1, 9});
  }

  std::vector<EliminationTrace> same(3, trace_of({2, 4, 6, 8}, {4, 8, 2}));
  for (HeuristicKind kind :
       {HeuristicKind::Union, HeuristicKind::Intersection, HeuristicKind::Quorum}) {
    CHECK(combine(same, 2, {kind}) == FeatureSet{2, 6});
  }
}

TEST_CASE("quorum sweeps between union and intersection") {
  std::mt19937_64 rng(99);
  std::vector<int> start;
  for (int id = 0; id < 12; ++id) start.push_back(id * 3);
  std::vector<EliminationTrace> traces;
  for (int k = 0; k < 5; ++k) traces.push_back(oracles::random_trace(rng, start));

  for (int t = 0; t < 12; ++t) {
    FeatureSet u = combine(traces, t, {HeuristicKind::Union});
    FeatureSet i = combine(traces, t, {HeuristicKind::Intersection});
    CHECK(combine(traces, t, {HeuristicKind::Quorum, 1}) == u);
    CHECK(combine(traces, t, {HeuristicKind::Quorum, 5}) == i);

    // raising the threshold never adds features
    FeatureSet prev = u;
    for (int q = 2; q <= 5; ++q) {
      FeatureSet cur = combine(traces, t, {HeuristicKind::Quorum, q});
      CHECK(cur.is_subset_of(prev));
      prev = cur;
    }
    CHECK(i.is_subset_of(combine(traces, t, {HeuristicKind::Quorum})));
  }
}

TEST_CASE("combine matches the vote-counting oracle") {
  std::mt19937_64 rng(7);
  std::vector<int> start = {0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<EliminationTrace> traces;
  for (int k = 0; k < 4; ++k) traces.push_back(oracles::random_trace(rng, start));

  for (int t = 0; t < 8; ++t) {
    std::vector<std::set<int>> survivors;
    for (const auto& trace : traces) {
      FeatureSet s = trace.surviving_set(t);
      survivors.emplace_back(s.begin(), s.end());
    }
    CHECK(combine(traces, t, {HeuristicKind::Union}) ==
          from_std(oracles::combine_sets(survivors, 1)));
    CHECK(combine(traces, t, {HeuristicKind::Intersection}) ==
          from_std(oracles::combine_sets(survivors, 4)));
    for (int q = 1; q <= 4; ++q) {
      CHECK(combine(traces, t, {HeuristicKind::Quorum, q}) ==
            from_std(oracles::combine_sets(survivors, q)));
    }
  }
}

TEST_CASE("combine is insensitive to trace order") {
  std::mt19937_64 rng(13);
  std::vector<int> start = {0, 1, 2, 3, 4, 5};
  std::vector<EliminationTrace> traces;
  for (int k = 0; k < 4; ++k) traces.push_back(oracles::random_trace(rng, start));
  std::vector<EliminationTrace> reversed(traces.rbegin(), traces.rend());

  for (int t = 0; t < 6; ++t) {
    for (HeuristicKind kind :
         {HeuristicKind::Union, HeuristicKind::Intersection, HeuristicKind::Quorum}) {
      CHECK(combine(traces, t, {kind}) == combine(reversed, t, {kind}));
    }
  }
}

TEST_CASE("an empty intersection is a legal outcome") {
  // two 2-feature traces keeping different survivors
  std::vector<EliminationTrace> traces = {trace_of({0, 1}, {0}), trace_of({0, 1}, {1})};
  CHECK(combine(traces, 1, {HeuristicKind::Intersection}).empty());
  CHECK(combine(traces, 1, {HeuristicKind::Union}) == FeatureSet{0, 1});
}

TEST_CASE("combine rejects malformed requests") {
  std::vector<EliminationTrace> traces = {trace_of({0, 1, 2}, {1, 0})};
  CHECK_THROWS_AS(combine({}, 0, {HeuristicKind::Union}), std::invalid_argument);
  CHECK_THROWS_AS(combine(traces, 3, {HeuristicKind::Union}), std::invalid_argument);
  CHECK_THROWS_AS(combine(traces, -1, {HeuristicKind::Union}), std::invalid_argument);

  std::vector<EliminationTrace> mismatched = {trace_of({0, 1, 2}, {1, 0}),
                                              trace_of({0, 1, 9}, {1, 0})};
  CHECK_THROWS_AS(combine(mismatched, 0, {HeuristicKind::Union}), std::invalid_argument);
}

TEST_CASE("quorum threshold validation and defaults") {
  CHECK(effective_quorum_threshold({HeuristicKind::Quorum}, 4) == 3);
  CHECK(effective_quorum_threshold({HeuristicKind::Quorum}, 5) == 3);
  CHECK(effective_quorum_threshold({HeuristicKind::Quorum}, 1) == 1);
  CHECK(effective_quorum_threshold({HeuristicKind::Quorum, 2}, 4) == 2);
  CHECK_THROWS_AS(effective_quorum_threshold({HeuristicKind::Quorum, 5}, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(effective_quorum_threshold({HeuristicKind::Quorum, -2}, 4),
                  std::invalid_argument);
}

TEST_CASE("trajectories cover every iteration and start full") {
  std::mt19937_64 rng(21);
  std::vector<int> start = {0, 1, 2, 3, 4, 5, 6};
  std::vector<EliminationTrace> traces;
  for (int k = 0; k < 3; ++k) traces.push_back(oracles::random_trace(rng, start));

  EnsembleTrajectory unions = build_trajectory(traces, {HeuristicKind::Union});
  REQUIRE(unions.per_iteration.size() == 7);
  CHECK(unions.per_iteration[0].t == 0);
  CHECK(unions.per_iteration[0].candidate == FeatureSet(start));
  for (std::size_t i = 0; i < unions.per_iteration.size(); ++i) {
    CHECK(unions.per_iteration[i].t == static_cast<int>(i));
    CHECK(unions.per_iteration[i].candidate ==
          combine(traces, static_cast<int>(i), {HeuristicKind::Union}));
    if (i > 0) {
      // union candidates shrink or hold as eliminations accumulate
      CHECK(unions.per_iteration[i].candidate.size() <=
            unions.per_iteration[i - 1].candidate.size());
    }
  }

  EnsembleTrajectory quorum = build_trajectory(traces, {HeuristicKind::Quorum, 2});
  CHECK(quorum.heuristic.kind == HeuristicKind::Quorum);
  CHECK(quorum.heuristic.quorum_threshold == 2);
  CHECK_THROWS_AS(build_trajectory({}, {HeuristicKind::Union}), std::invalid_argument);
}

TEST_CASE("one-hot augmentation adds the block exactly once") {
  FeatureSet candidate{0, 2, 5, 7};
  FeatureSet block{10, 11};
  CHECK(augment_with_onehot(candidate, block) == FeatureSet{0, 2, 5, 7, 10, 11});
  CHECK(augment_with_onehot(candidate, {}) == candidate);
  CHECK(augment_with_onehot({}, block) == block);
  CHECK(candidate.is_subset_of(augment_with_onehot(candidate, block)));
  CHECK_THROWS_AS(augment_with_onehot(FeatureSet{0, 10}, block), std::invalid_argument);
}

TEST_CASE("heuristic names round-trip and reject unknowns") {
  for (HeuristicKind k :
       {HeuristicKind::Union, HeuristicKind::Intersection, HeuristicKind::Quorum}) {
    CHECK(heuristic_from_name(heuristic_name(k)) == k);
  }
  CHECK_THROWS_AS(heuristic_from_name("majority"), UsageError);
}
