#include "enfs/config.hpp"

#include <charconv>
#include <fstream>
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

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = value.find(',', start);
    std::string item = trim(std::string_view(value).substr(
        start, pos == std::string::npos ? std::string::npos : pos - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("config key '" + key + "': expected integer, got '" + value + "'");
  }
  return v;
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("config key '" + key + "': expected unsigned integer, got '" +
                     value + "'");
  }
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("config key '" + key + "': expected number, got '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError("config key '" + key + "': expected true/false, got '" + value + "'");
}

}  // namespace

LearnerConfig RunConfig::make_learner(LearnerConfig::Kind kind) const {
  LearnerConfig lc;
  lc.kind = kind;
  lc.logreg = logreg;
  lc.forest = forest;
  return lc;
}

LearnerConfig RunConfig::make_cv_learner() const {
  LearnerConfig lc;
  lc.kind = cv_learner == "lr" ? LearnerConfig::Kind::LogReg
                               : LearnerConfig::Kind::Forest;
  lc.logreg = logreg;
  lc.forest = forest;
  if (lc.kind == LearnerConfig::Kind::Forest && cv_trees > 0) {
    lc.forest.n_trees = cv_trees;
  }
  return lc;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
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
      throw UsageError("config line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(stripped).substr(0, eq));
    std::string value = trim(std::string_view(stripped).substr(eq + 1));

    if (key == "data.source") {
      if (value != "synth" && value != "csv") {
        throw UsageError("config key 'data.source': expected synth or csv");
      }
      config.source = value;
    } else if (key == "data.train") {
      config.train_csv = value;
    } else if (key == "data.test") {
      config.test_csv = value;
    } else if (key == "data.schema") {
      config.schema_path = value;
    } else if (key == "data.label") {
      config.label_column = value;
    } else if (key == "synth.rows") {
      config.synth.n_rows = parse_int(key, value);
    } else if (key == "synth.informative") {
      config.synth.n_informative = parse_int(key, value);
    } else if (key == "synth.noise") {
      config.synth.n_noise = parse_int(key, value);
    } else if (key == "synth.redundant") {
      config.synth.n_redundant = parse_int(key, value);
    } else if (key == "synth.flip_prob") {
      config.synth.flip_prob = parse_real(key, value);
    } else if (key == "prefilter.threshold") {
      config.prefilter_threshold = parse_real(key, value);
    } else if (key == "selectors") {
      config.selectors.clear();
      for (const auto& name : split_list(value)) {
        SelectorKind kind = selector_from_name(name);
        bool dup = false;
        for (SelectorKind existing : config.selectors) dup = dup || existing == kind;
        if (!dup) config.selectors.push_back(kind);
      }
    } else if (key == "heuristics") {
      config.heuristics.clear();
      for (const auto& name : split_list(value)) {
        HeuristicKind kind = heuristic_from_name(name);
        bool dup = false;
        for (HeuristicKind existing : config.heuristics) dup = dup || existing == kind;
        if (!dup) config.heuristics.push_back(kind);
      }
    } else if (key == "quorum.threshold") {
      config.quorum_threshold = parse_int(key, value);
    } else if (key == "learners") {
      config.learners.clear();
      for (const auto& name : split_list(value)) {
        LearnerConfig::Kind kind;
        if (name == "lr") kind = LearnerConfig::Kind::LogReg;
        else if (name == "rf") kind = LearnerConfig::Kind::Forest;
        else throw UsageError("config key 'learners': unknown learner '" + name + "'");
        bool dup = false;
        for (auto existing : config.learners) dup = dup || existing == kind;
        if (!dup) config.learners.push_back(kind);
      }
    } else if (key == "lr.learning_rate") {
      config.logreg.learning_rate = parse_real(key, value);
    } else if (key == "lr.iterations") {
      config.logreg.iterations = parse_int(key, value);
    } else if (key == "lr.l2") {
      config.logreg.l2 = parse_real(key, value);
    } else if (key == "rf.trees") {
      config.forest.n_trees = parse_int(key, value);
    } else if (key == "rf.max_depth") {
      config.forest.max_depth = parse_int(key, value);
    } else if (key == "sbs.folds") {
      config.sbs.cv_folds = parse_int(key, value);
    } else if (key == "sbs.trees") {
      config.sbs.learner.n_trees = parse_int(key, value);
    } else if (key == "cv.folds") {
      config.cv_folds = parse_int(key, value);
    } else if (key == "cv.learner") {
      if (value != "lr" && value != "rf") {
        throw UsageError("config key 'cv.learner': expected lr or rf");
      }
      config.cv_learner = value;
    } else if (key == "cv.trees") {
      config.cv_trees = parse_int(key, value);
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "jobs") {
      config.jobs = parse_int(key, value);
    } else if (key == "onehot.augment") {
      config.onehot_augment = parse_bool(key, value);
    } else if (key == "seed") {
      config.seed = parse_u64(key, value);
      config.seed_set = true;
    } else if (key == "repeat.index") {
      config.repeat_index = parse_int(key, value);
    } else {
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" +
                       key + "'");
    }
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate_config(const RunConfig& config) {
  if (!config.seed_set) throw UsageError("config: 'seed' is required");
  if (config.selectors.empty()) throw UsageError("config: selector roster is empty");
  if (config.heuristics.empty()) throw UsageError("config: heuristic roster is empty");
  if (config.learners.empty()) throw UsageError("config: learner roster is empty");
  if (config.source == "csv") {
    if (config.train_csv.empty()) throw UsageError("config: 'data.train' is required");
    if (config.test_csv.empty()) throw UsageError("config: 'data.test' is required");
    if (config.schema_path.empty()) throw UsageError("config: 'data.schema' is required");
  }
  if (!(config.prefilter_threshold > 0.0 && config.prefilter_threshold <= 1.0)) {
    throw UsageError("config: 'prefilter.threshold' must be in (0,1]");
  }
  if (config.cv_folds < 2) throw UsageError("config: 'cv.folds' must be at least 2");
  if (config.sbs.cv_folds < 2) throw UsageError("config: 'sbs.folds' must be at least 2");
  if (config.logreg.iterations < 0 || config.logreg.learning_rate <= 0.0 ||
      config.logreg.l2 < 0.0) {
    throw UsageError("config: bad lr.* values");
  }
  if (config.forest.n_trees < 1 || config.forest.max_depth < 1 ||
      config.sbs.learner.n_trees < 1) {
    throw UsageError("config: bad rf.*/sbs.* values");
  }
  if (config.quorum_threshold < 0 ||
      config.quorum_threshold > static_cast<int>(config.selectors.size())) {
    throw UsageError("config: 'quorum.threshold' outside the selector roster size");
  }
  if (config.repeat_index < 0) throw UsageError("config: 'repeat.index' must be >= 0");
  if (config.jobs < 1) throw UsageError("config: 'jobs' must be at least 1");
  if (config.synth.n_rows < 2 || config.synth.n_informative < 1 ||
      config.synth.n_noise < 0 || config.synth.n_redundant < 0 ||
      !(config.synth.flip_prob >= 0.0 && config.synth.flip_prob < 0.5)) {
    throw UsageError("config: bad synth.* values");
  }
}

}  // namespace enfs
