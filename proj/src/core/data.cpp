#include "data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "error.hpp"

namespace relint {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Splits one record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

void Dataset::validate() const {
  if (samples.rows() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "dataset needs at least two samples");
  }
  if (labels.size() != samples.rows() ||
      static_cast<Eigen::Index>(feature_names.size()) != samples.cols()) {
    throw Error(ErrorCode::kDimension, "dataset dimensions are inconsistent");
  }
  bool neg = false;
  bool pos = false;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] == -1.0) {
      neg = true;
    } else if (labels[i] == 1.0) {
      pos = true;
    } else {
      throw Error(ErrorCode::kLabel, "labels must be -1 or +1");
    }
  }
  if (!neg || !pos) {
    throw Error(ErrorCode::kLabel, "both label classes must be present");
  }
}

Dataset Dataset::select_rows(std::span<const int> rows) const {
  Dataset out = *this;
  out.samples.resize(static_cast<Eigen::Index>(rows.size()), samples.cols());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.samples.row(static_cast<Eigen::Index>(i)) = samples.row(rows[i]);
    out.labels[static_cast<Eigen::Index>(i)] = labels[rows[i]];
  }
  return out;
}

Dataset Dataset::append_column(const Eigen::VectorXd& column, std::string name) const {
  if (column.size() != samples.rows()) {
    throw Error(ErrorCode::kDimension, "appended column has wrong length");
  }
  Dataset out = *this;
  out.samples.conservativeResize(Eigen::NoChange, samples.cols() + 1);
  out.samples.col(samples.cols()) = column;
  out.feature_names.push_back(std::move(name));
  if (!out.constant_columns.empty()) out.constant_columns.push_back(false);
  return out;
}

Dataset parse_csv(std::string_view text, std::string_view label_column,
                  std::string_view source) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    if (!trim(line).empty()) lines.push_back(line);
    start = end + 1;
  }
  const std::string where(source);
  if (lines.empty()) throw Error(ErrorCode::kParse, where + ": empty CSV");

  const auto header = split_record(lines[0]);
  int label_index = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column) {
      label_index = static_cast<int>(j);
      break;
    }
  }
  if (label_index < 0) {
    throw Error(ErrorCode::kLabel,
                where + ": label column '" + std::string(label_column) + "' not found");
  }

  Dataset ds;
  ds.label_column = std::string(label_column);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (static_cast<int>(j) != label_index) ds.feature_names.push_back(header[j]);
  }
  const auto n = static_cast<Eigen::Index>(lines.size() - 1);
  const auto d = static_cast<Eigen::Index>(ds.feature_names.size());
  ds.samples.resize(n, d);
  std::vector<std::string> raw_labels;
  raw_labels.reserve(lines.size());

  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_record(lines[r]);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kParse, where + ": line " + std::to_string(r + 1) +
                                         " has " + std::to_string(fields.size()) +
                                         " fields, header has " +
                                         std::to_string(header.size()));
    }
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (static_cast<int>(j) == label_index) {
        raw_labels.push_back(fields[j]);
        continue;
      }
      const auto value = parse_number(fields[j]);
      if (!value) {
        throw Error(ErrorCode::kParse, where + ": line " + std::to_string(r + 1) +
                                           ", column '" + header[j] +
                                           "': non-numeric value '" + fields[j] + "'");
      }
      ds.samples(static_cast<Eigen::Index>(r - 1), col++) = *value;
    }
  }

  std::vector<std::string> symbols = raw_labels;
  std::sort(symbols.begin(), symbols.end());
  symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
  if (symbols.size() != 2) {
    throw Error(ErrorCode::kLabel, where + ": label column '" + std::string(label_column) +
                                       "' has " + std::to_string(symbols.size()) +
                                       " distinct values, expected 2");
  }
  const auto a = parse_number(symbols[0]);
  const auto b = parse_number(symbols[1]);
  if (a && b && *a > *b) std::swap(symbols[0], symbols[1]);
  ds.label_names = {symbols[0], symbols[1]};
  ds.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ds.labels[i] = raw_labels[static_cast<std::size_t>(i)] == symbols[1] ? 1.0 : -1.0;
  }
  ds.validate();
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, std::string_view label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), label_column, path.string());
}

std::string to_csv(const Dataset& dataset) {
  std::string out;
  for (const auto& name : dataset.feature_names) {
    out += quote_if_needed(name);
    out.push_back(',');
  }
  out += quote_if_needed(dataset.label_column);
  out.push_back('\n');
  for (Eigen::Index i = 0; i < dataset.num_samples(); ++i) {
    for (Eigen::Index j = 0; j < dataset.num_features(); ++j) {
      append_number(out, dataset.samples(i, j));
      out.push_back(',');
    }
    out += quote_if_needed(dataset.label_names[dataset.labels[i] > 0 ? 1 : 0]);
    out.push_back('\n');
  }
  return out;
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << to_csv(dataset);
}

Dataset standardize(const Dataset& dataset, ColumnScaling* scaling) {
  if (dataset.standardized) {
    throw Error(ErrorCode::kInvalidArgument, "dataset is already standardized");
  }
  const Eigen::Index n = dataset.num_samples();
  const Eigen::Index d = dataset.num_features();
  Dataset out = dataset;
  out.standardized = true;
  out.constant_columns.assign(static_cast<std::size_t>(d), false);
  ColumnScaling local;
  local.mean.resize(d);
  local.sd.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto col = dataset.samples.col(j);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n));
    local.mean[j] = mean;
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      local.sd[j] = 0.0;
      out.samples.col(j).setZero();
      out.constant_columns[static_cast<std::size_t>(j)] = true;
    } else {
      local.sd[j] = sd;
      out.samples.col(j) = (col.array() - mean) / sd;
    }
  }
  if (scaling != nullptr) *scaling = std::move(local);
  return out;
}

Eigen::MatrixXd destandardize(const Eigen::MatrixXd& standardized,
                              const ColumnScaling& scaling) {
  Eigen::MatrixXd out = standardized;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) = (standardized.col(j).array() * scaling.sd[j] + scaling.mean[j]).matrix();
  }
  return out;
}

void SimulationSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kSpec, what); };
  if (n_strong < 0 || n_weak < 0 || n_irrelevant < 0) fail("feature counts must be >= 0");
  if (n_strong + n_weak < 1) {
    fail("at least one strongly or weakly relevant feature is needed to generate labels");
  }
  if (n_weak == 1) fail("a weakly relevant group needs at least two members");
  if (n_samples < 2) fail("at least two samples are needed");
  if (weak_group_size < 2) fail("weak_group_size must be >= 2");
  if (!(weak_jitter >= 0.0)) fail("weak_jitter must be >= 0");
  if (!(label_flip_rate >= 0.0 && label_flip_rate < 0.5)) {
    fail("label_flip_rate must be in [0, 0.5)");
  }
}

Simulation simulate(const SimulationSpec& spec) {
  spec.validate();
  std::vector<int> group_sizes;
  if (spec.n_weak > 0) {
    const int groups = std::max(1, spec.n_weak / spec.weak_group_size);
    for (int g = 0; g < groups; ++g) {
      group_sizes.push_back(spec.n_weak / groups + (g >= groups - spec.n_weak % groups ? 1 : 0));
    }
  }
  const int latent = spec.n_strong + static_cast<int>(group_sizes.size());
  const Eigen::Index n = spec.n_samples;

  std::mt19937_64 rng(spec.random_seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd prototype(latent);
  for (int k = 0; k < latent; ++k) {
    double w = 0.0;
    do {
      w = uniform(rng);
    } while (std::abs(w) < 0.2);
    prototype[k] = w;
  }
  Eigen::MatrixXd z(n, latent);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int k = 0; k < latent; ++k) z(i, k) = normal(rng);

  Simulation sim;
  Dataset& ds = sim.dataset;
  ds.samples.resize(n, spec.num_features());
  ds.labels.resize(n);
  const Eigen::VectorXd margin = z * prototype;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    double y = margin[i] >= 0.0 ? 1.0 : -1.0;
    if (spec.label_flip_rate > 0.0 && unit(rng) < spec.label_flip_rate) y = -y;
    ds.labels[i] = y;
  }

  Eigen::Index col = 0;
  for (int s = 0; s < spec.n_strong; ++s) {
    ds.samples.col(col++) = z.col(s);
    sim.truth.true_class.push_back(RelevanceClass::kStrong);
  }
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    const int size = group_sizes[g];
    const auto f = z.col(spec.n_strong + static_cast<int>(g));
    Eigen::VectorXd weights(size);
    for (int m = 0; m < size; ++m) weights[m] = 0.1 + unit(rng);
    weights /= weights.sum();
    Eigen::MatrixXd jitter(n, size);
    for (Eigen::Index i = 0; i < n; ++i)
      for (int m = 0; m < size; ++m) jitter(i, m) = spec.weak_jitter * normal(rng);
    // Centre the jitter so the weighted sum of the members is exactly f.
    const Eigen::VectorXd centre = jitter * weights;
    for (int m = 0; m < size; ++m) {
      ds.samples.col(col++) = f + jitter.col(m) - centre;
      sim.truth.true_class.push_back(RelevanceClass::kWeak);
    }
  }
  for (int r = 0; r < spec.n_irrelevant; ++r) {
    for (Eigen::Index i = 0; i < n; ++i) ds.samples(i, col) = normal(rng);
    ++col;
    sim.truth.true_class.push_back(RelevanceClass::kIrrelevant);
  }
  for (int j = 0; j < spec.num_features(); ++j) {
    ds.feature_names.push_back("f" + std::to_string(j + 1));
  }
  const bool neg = (ds.labels.array() < 0.0).any();
  const bool pos = (ds.labels.array() > 0.0).any();
  if (!neg || !pos) throw Error(ErrorCode::kSpec, "simulated labels contain a single class");
  return sim;
}

std::string ground_truth_csv(const Dataset& dataset, const GroundTruth& truth) {
  if (truth.true_class.size() != dataset.feature_names.size()) {
    throw Error(ErrorCode::kDimension, "ground truth does not match the feature count");
  }
  std::string out = "feature,class\n";
  for (std::size_t j = 0; j < truth.true_class.size(); ++j) {
    out += quote_if_needed(dataset.feature_names[j]);
    out += ',';
    out += std::to_string(static_cast<int>(truth.true_class[j]));
    out += '\n';
  }
  return out;
}

void write_ground_truth(const Dataset& dataset, const GroundTruth& truth,
                        const std::filesystem::path& path) {
  const std::string text = ground_truth_csv(dataset, truth);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
}

std::vector<Fold> stratified_kfold(const Eigen::VectorXd& labels, int k,
                                   std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kFold, "k must be at least 2");
  std::vector<int> negatives;
  std::vector<int> positives;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    (labels[i] > 0 ? positives : negatives).push_back(static_cast<int>(i));
  }
  if (static_cast<int>(negatives.size()) < k || static_cast<int>(positives.size()) < k) {
    throw Error(ErrorCode::kFold, "each class needs at least " + std::to_string(k) +
                                      " members for " + std::to_string(k) +
                                      "-fold stratification");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(negatives.begin(), negatives.end(), rng);
  std::shuffle(positives.begin(), positives.end(), rng);

  std::vector<Fold> folds(static_cast<std::size_t>(k));
  std::size_t slot = 0;
  for (const auto* group : {&negatives, &positives}) {
    for (int idx : *group) folds[slot++ % folds.size()].test.push_back(idx);
  }
  const auto n = static_cast<int>(labels.size());
  for (auto& fold : folds) {
    std::sort(fold.test.begin(), fold.test.end());
    std::vector<char> in_test(static_cast<std::size_t>(n), 0);
    for (int idx : fold.test) in_test[static_cast<std::size_t>(idx)] = 1;
    for (int i = 0; i < n; ++i) {
      if (!in_test[static_cast<std::size_t>(i)]) fold.train.push_back(i);
    }
  }
  return folds;
}

}  // namespace relint
