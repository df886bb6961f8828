#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "enfs/common.hpp"

namespace enfs {

enum class ColumnKind { Numeric, Categorical, OneHot };

std::string column_kind_name(ColumnKind k);

struct FeatureDescriptor {
  int id = 0;  // dense, equals the column position
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;

  // OneHot columns remember the categorical column they expand.
  std::string parent;
  std::string category;

  // Categorical columns store cell values as indices into this sorted list.
  std::vector<std::string> categories;

  // Training min/max, filled in by normalize_minmax.
  double train_min = 0.0;
  double train_max = 0.0;
};

// Labeled feature matrix with binary labels (1 = anomaly). Immutable after
// construction; every transform returns a fresh instance.
class Dataset {
 public:
  Dataset(std::vector<FeatureDescriptor> columns, std::vector<double> values,
          std::vector<int> labels, std::string provenance);

  int n_rows() const { return n_rows_; }
  int n_cols() const { return n_cols_; }
  double at(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * n_cols_ + col];
  }
  std::span<const double> row(int r) const {
    return {values_.data() + static_cast<std::size_t>(r) * n_cols_,
            static_cast<std::size_t>(n_cols_)};
  }
  const FeatureDescriptor& column(int id) const;
  const std::vector<FeatureDescriptor>& columns() const { return columns_; }
  int column_index(const std::string& name) const;  // -1 when absent
  std::vector<double> column_values(int id) const;
  int label(int r) const { return labels_[static_cast<std::size_t>(r)]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }
  const std::string& provenance() const { return provenance_; }
  int anomaly_count() const;

  FeatureSet features_of_kind(ColumnKind k) const;
  FeatureSet all_features() const;

  Dataset select_columns(const std::vector<std::string>& names) const;
  Dataset subset_rows(const std::vector<int>& rows) const;

  // Stable content tag used to pair stage artifacts with the data they came
  // from: hashes provenance, shape, and column names/kinds.
  uint64_t fingerprint() const;

 private:
  std::vector<FeatureDescriptor> columns_;
  std::vector<double> values_;  // row-major, n_rows x n_cols
  std::vector<int> labels_;
  std::string provenance_;
  int n_rows_ = 0;
  int n_cols_ = 0;
};

enum class SchemaKind { Numeric, Categorical, Exclude, Label };

// Column roles for a CSV file. Parsed from "name = kind" lines; '#' starts a
// comment. A "* = kind" entry supplies the role for undeclared columns.
struct Schema {
  std::vector<std::pair<std::string, SchemaKind>> entries;
  std::optional<SchemaKind> fallback;

  const SchemaKind* find(const std::string& name) const;
  std::string label_column() const;  // empty when none declared
};

Schema parse_schema_text(const std::string& text);
Schema load_schema(const std::string& path);
std::string schema_to_text(const Schema& schema);

struct LoadResult {
  Dataset dataset;
  std::vector<std::string> dropped_zero_variance;
  std::vector<std::string> excluded_columns;
};

// Read a headered CSV. label_column may be empty when the schema declares a
// label entry. Zero-variance numeric columns are dropped with a warning on
// stderr unless drop_zero_variance is false (used when a later column
// selection pins the layout to another file's).
LoadResult load_csv(const std::string& path, const Schema& schema,
                    const std::string& label_column,
                    bool drop_zero_variance = true);

// Replace a categorical column with one indicator column per category. The
// two-argument form uses the categories observed in `d` itself; the overload
// taking an explicit category list is for applying a training-time encoding
// to another split (values outside the list produce an all-zero block).
Dataset one_hot_encode(const Dataset& d, const std::string& column);
Dataset one_hot_encode(const Dataset& d, const std::string& column,
                       const std::vector<std::string>& categories);

// Min-max scale every numeric column of apply_to by train's per-column range.
// Columns constant in train map to 0; values outside the training range are
// not clipped. OneHot and Categorical columns pass through unchanged.
Dataset normalize_minmax(const Dataset& train, const Dataset& apply_to);

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // row -> fold in [0,k)
  uint64_t seed = 0;
};

// Deterministic stratified k-fold assignment. Per-class counts per fold
// differ by at most one. k equal to the row count yields leave-one-out;
// otherwise every class must have at least k rows.
FoldPlan stratified_kfold(const Dataset& d, int k, uint64_t seed);

struct SynthParams {
  int n_rows = 1000;
  int n_informative = 3;
  int n_noise = 10;
  int n_redundant = 2;
  double flip_prob = 0.05;
  uint64_t seed = 0;
};

struct SynthData {
  Dataset train;
  Dataset test;
};

// Generate a train/test pair with planted structure. Labels threshold a
// weighted sum of the informative columns at its training-set median, so
// classes are balanced; rows too close to the threshold are pushed to a
// fixed margin, which keeps the noise-free problem linearly separable.
// Redundant columns are affine copies of informative ones plus small jitter
// (|Pearson| > 0.95 with their parent). Train and test use disjoint
// sub-seeds of params.seed.
SynthData synth_generate(const SynthParams& params);

// Inverse of load_csv for generated data: header row, feature columns in id
// order, label last. Numeric cells are written with shortest round-trip
// formatting so a reload reproduces the values bit for bit.
void write_csv(const Dataset& d, const std::string& path,
               const std::string& label_column = "label");

// Schema matching a dataset's columns, e.g. for serializing synthetic data.
Schema schema_for(const Dataset& d, const std::string& label_column = "label");

}  // namespace enfs
