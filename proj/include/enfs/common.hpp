#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace enfs {

// Error categories aligned with the CLI exit codes: UsageError -> 1,
// DataError -> 2, anything else -> 3.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

uint64_t fnv1a64(std::string_view s);
uint64_t mix64(uint64_t x);

// Derive a sub-seed from a base seed and a content tag. Every worker seed is
// derived from the master seed plus stable tags, never from scheduling order,
// so serial and parallel execution produce identical results.
uint64_t seed_mix(uint64_t base, uint64_t tag);
uint64_t seed_mix(uint64_t base, std::string_view tag);

// Deterministic splitmix64 generator. The distributions in <random> are not
// bit-stable across standard library implementations; this one is.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64();

  // Uniform in [0,1), 53-bit resolution.
  double next_double();

  // Standard normal via Box-Muller. Consumes two uniforms per call.
  double next_normal();

  // Uniform integer in [0,n), n > 0.
  int next_below(int n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      std::swap(v[static_cast<std::size_t>(i)],
                v[static_cast<std::size_t>(next_below(i + 1))]);
    }
  }

 private:
  uint64_t state_;
};

// Set of feature ids (dataset column ids), stored sorted and unique.
class FeatureSet {
 public:
  FeatureSet() = default;
  explicit FeatureSet(std::vector<int> ids);
  FeatureSet(std::initializer_list<int> ids);

  bool contains(int id) const;
  void insert(int id);
  void erase(int id);
  int size() const { return static_cast<int>(ids_.size()); }
  bool empty() const { return ids_.empty(); }
  const std::vector<int>& ids() const { return ids_; }
  std::vector<int>::const_iterator begin() const { return ids_.begin(); }
  std::vector<int>::const_iterator end() const { return ids_.end(); }

  FeatureSet unite(const FeatureSet& other) const;
  FeatureSet intersect(const FeatureSet& other) const;
  FeatureSet minus(const FeatureSet& other) const;
  bool is_subset_of(const FeatureSet& other) const;
  uint64_t content_hash() const;

  bool operator==(const FeatureSet& other) const = default;

 private:
  std::vector<int> ids_;
};

// Run fn(0..n-1) on up to `jobs` threads. Each task must write only to its own
// result slot; the first exception is rethrown after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace enfs
