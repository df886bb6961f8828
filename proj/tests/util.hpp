#pragma once

// Shared test helpers: quick dataset construction, temp files, and naive
// reference implementations the library results are cross-checked against.
// Everything in oracles:: is deliberately brute-force.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "enfs/dataset.hpp"
#include "enfs/selectors.hpp"

namespace testutil {

inline enfs::Dataset make_dataset(const std::vector<std::vector<double>>& cols,
                                  const std::vector<int>& labels,
                                  const std::string& provenance = "test-data") {
  std::vector<enfs::FeatureDescriptor> desc;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    enfs::FeatureDescriptor d;
    d.id = static_cast<int>(c);
    d.name = "f" + std::to_string(c);
    d.kind = enfs::ColumnKind::Numeric;
    desc.push_back(std::move(d));
  }
  std::size_t rows = labels.size();
  std::vector<double> values(rows * cols.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      values[r * cols.size() + c] = cols[c][r];
    }
  }
  return enfs::Dataset(std::move(desc), std::move(values), labels, provenance);
}

// Fresh scratch directory under the test binary's working directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
  std::filesystem::path dir = std::filesystem::path("scratch") / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace testutil

namespace oracles {

// Pearson through the uncentered textbook arrangement, unlike the library's
// centered-sum form.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  double num = n * sxy - sx * sy;
  double den = std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy);
  return num / den;
}

// Chi-square with explicit observed/expected tables.
inline double chi_square(const std::vector<double>& x, const std::vector<int>& labels) {
  double observed[2] = {0.0, 0.0};
  double count[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    observed[labels[i]] += x[i];
    count[labels[i]] += 1.0;
  }
  double total = observed[0] + observed[1];
  double n = count[0] + count[1];
  double score = 0.0;
  for (int c = 0; c < 2; ++c) {
    double expected = total * (count[c] / n);
    score += (observed[c] - expected) * (observed[c] - expected) / expected;
  }
  return score;
}

// Vote-counting combine over plain std::set survivors.
inline std::set<int> combine_sets(const std::vector<std::set<int>>& survivors, int needed) {
  std::map<int, int> votes;
  for (const auto& s : survivors) {
    for (int id : s) votes[id] += 1;
  }
  std::set<int> out;
  for (const auto& [id, v] : votes) {
    if (v >= needed) out.insert(id);
  }
  return out;
}

inline std::vector<double> rank_vector(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(rank_vector(a), rank_vector(b));
}

// Random elimination trace over a random start set; scores are arbitrary.
inline enfs::EliminationTrace random_trace(std::mt19937_64& rng, const std::vector<int>& start) {
  enfs::EliminationTrace trace;
  trace.selector = enfs::SelectorKind::Univariate;
  trace.start_set = enfs::FeatureSet(start);
  std::vector<int> order = trace.start_set.ids();
  std::shuffle(order.begin(), order.end(), rng);
  order.pop_back();
  trace.order = order;
  trace.scores.assign(order.size(), 0.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& s : trace.scores) s = u(rng);
  return trace;
}

}  // namespace oracles
