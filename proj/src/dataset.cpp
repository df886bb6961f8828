#include "enfs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace enfs {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    cells.push_back(trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  const char* first = cell.data();
  const char* last = first + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

std::string column_kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::Numeric: return "numeric";
    case ColumnKind::Categorical: return "categorical";
    case ColumnKind::OneHot: return "onehot";
  }
  return "?";
}

Dataset::Dataset(std::vector<FeatureDescriptor> columns, std::vector<double> values,
                 std::vector<int> labels, std::string provenance)
    : columns_(std::move(columns)),
      values_(std::move(values)),
      labels_(std::move(labels)),
      provenance_(std::move(provenance)) {
  n_cols_ = static_cast<int>(columns_.size());
  n_rows_ = static_cast<int>(labels_.size());
  if (values_.size() != static_cast<std::size_t>(n_rows_) * n_cols_) {
    throw std::invalid_argument("Dataset: value count does not match rows x columns");
  }
  for (int j = 0; j < n_cols_; ++j) {
    if (columns_[static_cast<std::size_t>(j)].id != j) {
      throw std::invalid_argument("Dataset: column ids must be dense 0..n_cols-1");
    }
  }
  for (int y : labels_) {
    if (y != 0 && y != 1) {
      throw std::invalid_argument("Dataset: labels must be 0 or 1");
    }
  }
}

const FeatureDescriptor& Dataset::column(int id) const {
  if (id < 0 || id >= n_cols_) {
    throw std::invalid_argument("Dataset::column: id " + std::to_string(id) +
                                " out of range");
  }
  return columns_[static_cast<std::size_t>(id)];
}

int Dataset::column_index(const std::string& name) const {
  for (int j = 0; j < n_cols_; ++j) {
    if (columns_[static_cast<std::size_t>(j)].name == name) return j;
  }
  return -1;
}

std::vector<double> Dataset::column_values(int id) const {
  column(id);  // bounds check
  std::vector<double> out(static_cast<std::size_t>(n_rows_));
  for (int i = 0; i < n_rows_; ++i) out[static_cast<std::size_t>(i)] = at(i, id);
  return out;
}

int Dataset::anomaly_count() const {
  return static_cast<int>(std::count(labels_.begin(), labels_.end(), 1));
}

FeatureSet Dataset::features_of_kind(ColumnKind k) const {
  std::vector<int> ids;
  for (const auto& c : columns_) {
    if (c.kind == k) ids.push_back(c.id);
  }
  return FeatureSet(std::move(ids));
}

FeatureSet Dataset::all_features() const {
  std::vector<int> ids(static_cast<std::size_t>(n_cols_));
  std::iota(ids.begin(), ids.end(), 0);
  return FeatureSet(std::move(ids));
}

Dataset Dataset::select_columns(const std::vector<std::string>& names) const {
  std::vector<int> src;
  src.reserve(names.size());
  for (const auto& name : names) {
    int j = column_index(name);
    if (j < 0) throw DataError("select_columns: column '" + name + "' not found");
    src.push_back(j);
  }
  std::vector<FeatureDescriptor> cols;
  cols.reserve(src.size());
  for (std::size_t k = 0; k < src.size(); ++k) {
    FeatureDescriptor c = columns_[static_cast<std::size_t>(src[k])];
    c.id = static_cast<int>(k);
    cols.push_back(std::move(c));
  }
  std::vector<double> vals(static_cast<std::size_t>(n_rows_) * src.size());
  for (int i = 0; i < n_rows_; ++i) {
    for (std::size_t k = 0; k < src.size(); ++k) {
      vals[static_cast<std::size_t>(i) * src.size() + k] = at(i, src[k]);
    }
  }
  return Dataset(std::move(cols), std::move(vals), labels_, provenance_);
}

Dataset Dataset::subset_rows(const std::vector<int>& rows) const {
  std::vector<double> vals(rows.size() * static_cast<std::size_t>(n_cols_));
  std::vector<int> labs(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    int r = rows[k];
    if (r < 0 || r >= n_rows_) {
      throw std::invalid_argument("subset_rows: row index out of range");
    }
    std::copy_n(values_.data() + static_cast<std::size_t>(r) * n_cols_, n_cols_,
                vals.data() + k * static_cast<std::size_t>(n_cols_));
    labs[k] = labels_[static_cast<std::size_t>(r)];
  }
  return Dataset(columns_, std::move(vals), std::move(labs), provenance_);
}

uint64_t Dataset::fingerprint() const {
  uint64_t h = fnv1a64(provenance_);
  h = mix64(h ^ static_cast<uint64_t>(n_rows_));
  h = mix64(h ^ static_cast<uint64_t>(n_cols_));
  for (const auto& c : columns_) {
    h = mix64(h ^ fnv1a64(c.name));
    h = mix64(h ^ static_cast<uint64_t>(c.kind));
  }
  return h;
}

const SchemaKind* Schema::find(const std::string& name) const {
  for (const auto& [n, k] : entries) {
    if (n == name) return &k;
  }
  return nullptr;
}

std::string Schema::label_column() const {
  for (const auto& [n, k] : entries) {
    if (k == SchemaKind::Label) return n;
  }
  return "";
}

Schema parse_schema_text(const std::string& text) {
  Schema schema;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw DataError("schema line " + std::to_string(line_no) +
                      ": expected 'column = kind'");
    }
    std::string name = trim(std::string_view(stripped).substr(0, eq));
    std::string kind = trim(std::string_view(stripped).substr(eq + 1));
    SchemaKind k;
    if (kind == "numeric") k = SchemaKind::Numeric;
    else if (kind == "categorical") k = SchemaKind::Categorical;
    else if (kind == "exclude") k = SchemaKind::Exclude;
    else if (kind == "label") k = SchemaKind::Label;
    else {
      throw DataError("schema line " + std::to_string(line_no) +
                      ": unknown kind '" + kind + "'");
    }
    if (name.empty()) {
      throw DataError("schema line " + std::to_string(line_no) + ": empty column name");
    }
    if (name == "*") {
      schema.fallback = k;
      continue;
    }
    if (schema.find(name) != nullptr) {
      throw DataError("schema: duplicate entry for column '" + name + "'");
    }
    schema.entries.emplace_back(std::move(name), k);
  }
  return schema;
}

Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_schema_text(buf.str());
}

std::string schema_to_text(const Schema& schema) {
  std::string out;
  for (const auto& [name, kind] : schema.entries) {
    out += name;
    out += " = ";
    switch (kind) {
      case SchemaKind::Numeric: out += "numeric"; break;
      case SchemaKind::Categorical: out += "categorical"; break;
      case SchemaKind::Exclude: out += "exclude"; break;
      case SchemaKind::Label: out += "label"; break;
    }
    out += "\n";
  }
  if (schema.fallback) {
    out += "* = ";
    switch (*schema.fallback) {
      case SchemaKind::Numeric: out += "numeric"; break;
      case SchemaKind::Categorical: out += "categorical"; break;
      case SchemaKind::Exclude: out += "exclude"; break;
      case SchemaKind::Label: out += "label"; break;
    }
    out += "\n";
  }
  return out;
}

LoadResult load_csv(const std::string& path, const Schema& schema,
                    const std::string& label_column, bool drop_zero_variance) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line);

  std::string label_name = label_column.empty() ? schema.label_column() : label_column;
  if (label_name.empty()) {
    throw DataError(path + ": no label column declared");
  }
  if (!label_column.empty()) {
    const SchemaKind* declared = schema.find(label_column);
    if (declared != nullptr && *declared != SchemaKind::Label) {
      throw DataError(path + ": column '" + label_column +
                      "' given as label but declared otherwise in the schema");
    }
    std::string schema_label = schema.label_column();
    if (!schema_label.empty() && schema_label != label_column) {
      throw DataError(path + ": label column '" + label_column +
                      "' disagrees with schema label '" + schema_label + "'");
    }
  }

  // Every schema entry must name a real column.
  for (const auto& [name, kind] : schema.entries) {
    (void)kind;
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw DataError(path + ": schema declares unknown column '" + name + "'");
    }
  }

  int label_pos = -1;
  std::vector<int> role(header.size());  // 0 numeric, 1 categorical, 2 skip
  std::vector<std::string> excluded;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string& name = header[j];
    if (name == label_name) {
      if (label_pos >= 0) throw DataError(path + ": duplicate label column");
      label_pos = static_cast<int>(j);
      role[j] = 2;
      continue;
    }
    const SchemaKind* k = schema.find(name);
    SchemaKind kind;
    if (k != nullptr) {
      kind = *k;
    } else if (schema.fallback) {
      kind = *schema.fallback;
    } else {
      throw DataError(path + ": column '" + name +
                      "' not declared in schema and no '*' fallback given");
    }
    switch (kind) {
      case SchemaKind::Numeric: role[j] = 0; break;
      case SchemaKind::Categorical: role[j] = 1; break;
      case SchemaKind::Exclude:
        role[j] = 2;
        excluded.push_back(name);
        break;
      case SchemaKind::Label:
        throw DataError(path + ": schema label '" + name +
                        "' conflicts with label column '" + label_name + "'");
    }
  }
  if (label_pos < 0) {
    throw DataError(path + ": label column '" + label_name + "' not found");
  }

  std::vector<std::vector<double>> numeric_cols(header.size());
  std::vector<std::vector<std::string>> categorical_cols(header.size());
  std::vector<int> labels;

  int line_no = 1;  // header was line 1
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (static_cast<int>(j) == label_pos) {
        double v;
        if (!parse_double(cells[j], v) || (v != 0.0 && v != 1.0)) {
          throw DataError(path + ": line " + std::to_string(line_no) +
                          ": non-binary label '" + cells[j] + "'");
        }
        labels.push_back(static_cast<int>(v));
      } else if (role[j] == 0) {
        double v;
        if (cells[j].empty() || !parse_double(cells[j], v)) {
          throw DataError(path + ": line " + std::to_string(line_no) + ": column '" +
                          header[j] + "': cannot parse numeric value '" + cells[j] +
                          "'");
        }
        numeric_cols[j].push_back(v);
      } else if (role[j] == 1) {
        if (cells[j].empty()) {
          throw DataError(path + ": line " + std::to_string(line_no) + ": column '" +
                          header[j] + "': empty categorical value");
        }
        categorical_cols[j].push_back(cells[j]);
      }
    }
  }
  if (labels.empty()) throw DataError(path + ": no data rows");
  int n_rows = static_cast<int>(labels.size());

  std::vector<std::string> dropped;
  std::vector<FeatureDescriptor> descriptors;
  std::vector<const std::vector<double>*> numeric_src;
  std::vector<std::vector<double>> categorical_coded(header.size());

  for (std::size_t j = 0; j < header.size(); ++j) {
    if (role[j] == 2) continue;
    if (role[j] == 0) {
      const auto& col = numeric_cols[j];
      bool constant = std::all_of(col.begin(), col.end(),
                                  [&](double v) { return v == col.front(); });
      if (constant && drop_zero_variance) {
        std::fprintf(stderr, "warning: %s: dropping zero-variance column '%s'\n",
                     path.c_str(), header[j].c_str());
        dropped.push_back(header[j]);
        continue;
      }
      FeatureDescriptor c;
      c.id = static_cast<int>(descriptors.size());
      c.name = header[j];
      c.kind = ColumnKind::Numeric;
      descriptors.push_back(std::move(c));
      numeric_src.push_back(&numeric_cols[j]);
    } else {
      std::vector<std::string> cats = categorical_cols[j];
      std::sort(cats.begin(), cats.end());
      cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
      auto& coded = categorical_coded[j];
      coded.reserve(categorical_cols[j].size());
      for (const auto& v : categorical_cols[j]) {
        auto it = std::lower_bound(cats.begin(), cats.end(), v);
        coded.push_back(static_cast<double>(it - cats.begin()));
      }
      FeatureDescriptor c;
      c.id = static_cast<int>(descriptors.size());
      c.name = header[j];
      c.kind = ColumnKind::Categorical;
      c.categories = std::move(cats);
      descriptors.push_back(std::move(c));
      numeric_src.push_back(&categorical_coded[j]);
    }
  }
  if (descriptors.empty()) throw DataError(path + ": no usable feature columns");

  std::size_t n_cols = descriptors.size();
  std::vector<double> values(static_cast<std::size_t>(n_rows) * n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) {
    const auto& src = *numeric_src[c];
    for (int i = 0; i < n_rows; ++i) {
      values[static_cast<std::size_t>(i) * n_cols + c] = src[static_cast<std::size_t>(i)];
    }
  }

  return LoadResult{Dataset(std::move(descriptors), std::move(values),
                            std::move(labels), path),
                    std::move(dropped), std::move(excluded)};
}

Dataset one_hot_encode(const Dataset& d, const std::string& column) {
  int j = d.column_index(column);
  if (j < 0) throw std::invalid_argument("one_hot_encode: no column '" + column + "'");
  return one_hot_encode(d, column, d.column(j).categories);
}

Dataset one_hot_encode(const Dataset& d, const std::string& column,
                       const std::vector<std::string>& categories) {
  int target = d.column_index(column);
  if (target < 0) {
    throw std::invalid_argument("one_hot_encode: no column '" + column + "'");
  }
  const FeatureDescriptor& src = d.column(target);
  if (src.kind != ColumnKind::Categorical) {
    throw std::invalid_argument("one_hot_encode: column '" + column +
                                "' is not categorical");
  }
  if (categories.empty()) {
    throw std::invalid_argument("one_hot_encode: empty category list");
  }

  std::vector<FeatureDescriptor> cols;
  cols.reserve(d.columns().size() + categories.size() - 1);
  for (int j = 0; j < d.n_cols(); ++j) {
    if (j == target) {
      for (const auto& cat : categories) {
        FeatureDescriptor c;
        c.name = column + "=" + cat;
        c.kind = ColumnKind::OneHot;
        c.parent = column;
        c.category = cat;
        cols.push_back(std::move(c));
      }
    } else {
      cols.push_back(d.column(j));
    }
  }
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j].id = static_cast<int>(j);

  std::size_t n_cols = cols.size();
  std::vector<double> values(static_cast<std::size_t>(d.n_rows()) * n_cols);
  for (int i = 0; i < d.n_rows(); ++i) {
    std::size_t out_j = 0;
    for (int j = 0; j < d.n_cols(); ++j) {
      if (j == target) {
        int code = static_cast<int>(d.at(i, j));
        const std::string& value = src.categories[static_cast<std::size_t>(code)];
        // Category missing from the list (unseen at training time) leaves the
        // whole indicator block at zero.
        for (std::size_t c = 0; c < categories.size(); ++c) {
          values[static_cast<std::size_t>(i) * n_cols + out_j + c] =
              (categories[c] == value) ? 1.0 : 0.0;
        }
        out_j += categories.size();
      } else {
        values[static_cast<std::size_t>(i) * n_cols + out_j] = d.at(i, j);
        ++out_j;
      }
    }
  }
  return Dataset(std::move(cols), std::move(values), d.labels(), d.provenance());
}

Dataset normalize_minmax(const Dataset& train, const Dataset& apply_to) {
  if (train.n_cols() != apply_to.n_cols()) {
    throw std::invalid_argument("normalize_minmax: column layout mismatch");
  }
  for (int j = 0; j < train.n_cols(); ++j) {
    if (train.column(j).name != apply_to.column(j).name ||
        train.column(j).kind != apply_to.column(j).kind) {
      throw std::invalid_argument("normalize_minmax: column layout mismatch at '" +
                                  apply_to.column(j).name + "'");
    }
  }

  std::vector<FeatureDescriptor> cols = apply_to.columns();
  std::vector<double> lo(cols.size(), 0.0);
  std::vector<double> hi(cols.size(), 0.0);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].kind == ColumnKind::Numeric) {
      double mn = train.at(0, static_cast<int>(j));
      double mx = mn;
      for (int i = 1; i < train.n_rows(); ++i) {
        double v = train.at(i, static_cast<int>(j));
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      lo[j] = mn;
      hi[j] = mx;
      cols[j].train_min = mn;
      cols[j].train_max = mx;
    } else if (cols[j].kind == ColumnKind::OneHot) {
      cols[j].train_min = 0.0;
      cols[j].train_max = 1.0;
    }
  }

  std::vector<double> values(apply_to.values());
  std::size_t n_cols = cols.size();
  for (std::size_t j = 0; j < n_cols; ++j) {
    if (cols[j].kind != ColumnKind::Numeric) continue;
    double span = hi[j] - lo[j];
    for (int i = 0; i < apply_to.n_rows(); ++i) {
      double& v = values[static_cast<std::size_t>(i) * n_cols + j];
      v = (span > 0.0) ? (v - lo[j]) / span : 0.0;
    }
  }
  return Dataset(std::move(cols), std::move(values), apply_to.labels(),
                 apply_to.provenance());
}

FoldPlan stratified_kfold(const Dataset& d, int k, uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_kfold: k must be at least 2");
  if (k > d.n_rows()) {
    throw std::invalid_argument("stratified_kfold: k exceeds the row count");
  }

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(static_cast<std::size_t>(d.n_rows()), 0);

  if (k == d.n_rows()) {
    // Leave-one-out: every row is its own fold.
    for (int i = 0; i < d.n_rows(); ++i) plan.assignments[static_cast<std::size_t>(i)] = i;
    return plan;
  }

  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<int> rows;
    for (int i = 0; i < d.n_rows(); ++i) {
      if (d.label(i) == cls) rows.push_back(i);
    }
    if (static_cast<int>(rows.size()) < k) {
      throw DataError("stratified_kfold: class " + std::to_string(cls) + " has " +
                      std::to_string(rows.size()) + " rows, fewer than k=" +
                      std::to_string(k));
    }
    Rng rng(seed_mix(seed, static_cast<uint64_t>(cls)));
    rng.shuffle(rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      plan.assignments[static_cast<std::size_t>(rows[i])] =
          static_cast<int>(i % static_cast<std::size_t>(k));
    }
  }
  return plan;
}

namespace {

struct RedundantSpec {
  int parent;
  double scale;
  double offset;
};

Dataset synth_split(const SynthParams& p, const std::string& split,
                    const std::vector<double>& w, double w_sq_sum,
                    const std::vector<RedundantSpec>& red, double* theta_io,
                    double* delta_io) {
  const int n = p.n_rows;
  const int ni = p.n_informative;
  Rng rng_x(seed_mix(p.seed, "synth-x-" + split));
  Rng rng_noise(seed_mix(p.seed, "synth-noise-" + split));
  Rng rng_jitter(seed_mix(p.seed, "synth-jitter-" + split));
  Rng rng_flip(seed_mix(p.seed, "synth-flip-" + split));

  std::vector<double> inf(static_cast<std::size_t>(n) * ni);
  for (auto& v : inf) v = rng_x.next_double();

  std::vector<double> s(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < ni; ++j) acc += w[static_cast<std::size_t>(j)] * inf[static_cast<std::size_t>(i) * ni + j];
    s[static_cast<std::size_t>(i)] = acc;
  }

  double theta;
  double delta;
  if (split == "train") {
    std::vector<double> sorted(s);
    std::sort(sorted.begin(), sorted.end());
    if (n % 2 == 0) {
      theta = 0.5 * (sorted[static_cast<std::size_t>(n / 2 - 1)] +
                     sorted[static_cast<std::size_t>(n / 2)]);
    } else {
      theta = sorted[static_cast<std::size_t>(n / 2)];
    }
    double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    var /= n;
    delta = 0.08 * std::sqrt(var);
    *theta_io = theta;
    *delta_io = delta;
  } else {
    theta = *theta_io;
    delta = *delta_io;
  }

  // Push rows inside the margin band out to +-1.5*delta so the labeling rule
  // is linearly separable with margin delta even at the median threshold.
  for (int i = 0; i < n; ++i) {
    double dist = s[static_cast<std::size_t>(i)] - theta;
    if (std::abs(dist) < delta) {
      double target = theta + (dist >= 0.0 ? 1.5 * delta : -1.5 * delta);
      double step = (target - s[static_cast<std::size_t>(i)]) / w_sq_sum;
      for (int j = 0; j < ni; ++j) {
        inf[static_cast<std::size_t>(i) * ni + j] += step * w[static_cast<std::size_t>(j)];
      }
      s[static_cast<std::size_t>(i)] = target;
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int y = s[static_cast<std::size_t>(i)] > theta ? 1 : 0;
    if (rng_flip.next_double() < p.flip_prob) y = 1 - y;
    labels[static_cast<std::size_t>(i)] = y;
  }

  int n_cols = ni + p.n_redundant + p.n_noise;
  std::vector<double> values(static_cast<std::size_t>(n) * n_cols);
  for (int i = 0; i < n; ++i) {
    double* row = values.data() + static_cast<std::size_t>(i) * n_cols;
    for (int j = 0; j < ni; ++j) row[j] = inf[static_cast<std::size_t>(i) * ni + j];
    for (int r = 0; r < p.n_redundant; ++r) {
      const RedundantSpec& spec = red[static_cast<std::size_t>(r)];
      row[ni + r] = spec.scale * inf[static_cast<std::size_t>(i) * ni + spec.parent] +
                    spec.offset + 0.02 * rng_jitter.next_normal();
    }
    for (int z = 0; z < p.n_noise; ++z) {
      row[ni + p.n_redundant + z] = rng_noise.next_double();
    }
  }

  std::vector<FeatureDescriptor> cols;
  cols.reserve(static_cast<std::size_t>(n_cols));
  for (int j = 0; j < ni; ++j) {
    FeatureDescriptor c;
    c.id = static_cast<int>(cols.size());
    c.name = "inf_" + std::to_string(j);
    cols.push_back(std::move(c));
  }
  for (int r = 0; r < p.n_redundant; ++r) {
    FeatureDescriptor c;
    c.id = static_cast<int>(cols.size());
    c.name = "red_" + std::to_string(r);
    cols.push_back(std::move(c));
  }
  for (int z = 0; z < p.n_noise; ++z) {
    FeatureDescriptor c;
    c.id = static_cast<int>(cols.size());
    c.name = "noise_" + std::to_string(z);
    cols.push_back(std::move(c));
  }

  std::string provenance = "synth(seed=" + std::to_string(p.seed) +
                           ",rows=" + std::to_string(p.n_rows) +
                           ",informative=" + std::to_string(p.n_informative) +
                           ",noise=" + std::to_string(p.n_noise) +
                           ",redundant=" + std::to_string(p.n_redundant) +
                           ",flip=" + format_double(p.flip_prob) + ")/" + split;
  return Dataset(std::move(cols), std::move(values), std::move(labels),
                 std::move(provenance));
}

}  // namespace

SynthData synth_generate(const SynthParams& params) {
  if (params.n_rows < 2) throw std::invalid_argument("synth_generate: n_rows must be >= 2");
  if (params.n_informative < 1) {
    throw std::invalid_argument("synth_generate: n_informative must be >= 1");
  }
  if (params.n_noise < 0 || params.n_redundant < 0) {
    throw std::invalid_argument("synth_generate: negative column count");
  }
  if (!(params.flip_prob >= 0.0 && params.flip_prob < 0.5)) {
    throw std::invalid_argument("synth_generate: flip_prob must be in [0, 0.5)");
  }

  Rng rng_w(seed_mix(params.seed, "synth-weights"));
  std::vector<double> w(static_cast<std::size_t>(params.n_informative));
  double w_sq_sum = 0.0;
  for (auto& v : w) {
    v = 0.6 + 0.8 * rng_w.next_double();
    w_sq_sum += v * v;
  }

  Rng rng_r(seed_mix(params.seed, "synth-redundant"));
  std::vector<RedundantSpec> red;
  red.reserve(static_cast<std::size_t>(params.n_redundant));
  for (int r = 0; r < params.n_redundant; ++r) {
    RedundantSpec spec;
    spec.parent = r % params.n_informative;
    spec.scale = 0.5 + 1.5 * rng_r.next_double();
    spec.offset = -0.2 + 0.4 * rng_r.next_double();
    red.push_back(spec);
  }

  double theta = 0.0;
  double delta = 0.0;
  Dataset train = synth_split(params, "train", w, w_sq_sum, red, &theta, &delta);
  Dataset test = synth_split(params, "test", w, w_sq_sum, red, &theta, &delta);
  return SynthData{std::move(train), std::move(test)};
}

void write_csv(const Dataset& d, const std::string& path,
               const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (int j = 0; j < d.n_cols(); ++j) {
    out << d.column(j).name << ',';
  }
  out << label_column << '\n';
  for (int i = 0; i < d.n_rows(); ++i) {
    for (int j = 0; j < d.n_cols(); ++j) {
      const FeatureDescriptor& c = d.column(j);
      if (c.kind == ColumnKind::Categorical) {
        out << c.categories[static_cast<std::size_t>(static_cast<int>(d.at(i, j)))];
      } else {
        out << format_double(d.at(i, j));
      }
      out << ',';
    }
    out << d.label(i) << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

Schema schema_for(const Dataset& d, const std::string& label_column) {
  Schema schema;
  for (const auto& c : d.columns()) {
    schema.entries.emplace_back(c.name, c.kind == ColumnKind::Categorical
                                            ? SchemaKind::Categorical
                                            : SchemaKind::Numeric);
  }
  schema.entries.emplace_back(label_column, SchemaKind::Label);
  return schema;
}

}  // namespace enfs
