#include "benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"
#include "report.hpp"

namespace relint {

using nlohmann::json;

SelectionScore score_counts(int tp, int fp, int fn) {
  SelectionScore s;
  s.tp = tp;
  s.fp = fp;
  s.fn = fn;
  s.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

SelectionScore score_selection(const std::vector<bool>& predicted_relevant,
                               const GroundTruth& truth) {
  if (predicted_relevant.size() != truth.true_class.size()) {
    throw Error(ErrorCode::kDimension, "selection and ground truth differ in length");
  }
  int tp = 0, fp = 0, fn = 0;
  for (std::size_t j = 0; j < predicted_relevant.size(); ++j) {
    const bool relevant = truth.true_class[j] != RelevanceClass::kIrrelevant;
    if (predicted_relevant[j] && relevant) ++tp;
    if (predicted_relevant[j] && !relevant) ++fp;
    if (!predicted_relevant[j] && relevant) ++fn;
  }
  return score_counts(tp, fp, fn);
}

std::vector<NamedSpec> standard_configs() {
  const int table[5][3] = {{4, 4, 22}, {12, 8, 10}, {4, 0, 26}, {18, 0, 12}, {0, 20, 10}};
  std::vector<NamedSpec> out;
  for (int k = 0; k < 5; ++k) {
    NamedSpec c;
    c.name = "Sim" + std::to_string(k + 1);
    c.spec.n_strong = table[k][0];
    c.spec.n_weak = table[k][1];
    c.spec.n_irrelevant = table[k][2];
    c.spec.n_samples = 500;
    out.push_back(c);
  }
  return out;
}

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

ReplicateRow run_replicate(const NamedSpec& config, std::size_t config_index, int replicate,
                           const BenchmarkOptions& options, const lp::SolverConfig& solver) {
  ReplicateRow row;
  row.config = config_index;
  row.replicate = replicate;
  row.data_seed = derive_seed(derive_seed(options.seed, 100 + config_index),
                              static_cast<std::uint64_t>(replicate));
  const auto start = std::chrono::steady_clock::now();
  try {
    SimulationSpec spec = config.spec;
    spec.random_seed = row.data_seed;
    const Simulation sim = simulate(spec);
    AnalyzeParams params = options.analysis;
    params.seed = derive_seed(row.data_seed, 3);
    params.workers = 1;
    const AnalysisResult result = analyze(sim.dataset, params, solver);
    std::vector<bool> selected;
    for (auto c : result.classes.classes) selected.push_back(c != RelevanceClass::kIrrelevant);
    row.score = score_selection(selected, sim.truth);
    row.train_accuracy =
        accuracy(result.data.labels, predict(result.baseline, result.data.samples));
    row.strong = result.classes.count(RelevanceClass::kStrong);
    row.weak = result.classes.count(RelevanceClass::kWeak);
    row.irrelevant = result.classes.count(RelevanceClass::kIrrelevant);
    row.ok = true;
    if (options.observer) options.observer(row, sim, result);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBudgetExceeded) throw;
    row.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

ConfigSummary summarize(const NamedSpec& config, const std::vector<ReplicateRow>& rows) {
  ConfigSummary s;
  s.config = config;
  std::vector<double> precision, recall, f1, acc, seconds;
  for (const auto& row : rows) {
    ++s.replicates;
    if (!row.ok) {
      ++s.failures;
      continue;
    }
    precision.push_back(row.score.precision);
    recall.push_back(row.score.recall);
    f1.push_back(row.score.f1);
    acc.push_back(row.train_accuracy);
    seconds.push_back(row.seconds);
  }
  s.mean_precision = mean_of(precision);
  s.sd_precision = sd_of(precision);
  s.mean_recall = mean_of(recall);
  s.sd_recall = sd_of(recall);
  s.mean_f1 = mean_of(f1);
  s.sd_f1 = sd_of(f1);
  s.mean_train_accuracy = mean_of(acc);
  s.min_train_accuracy = acc.empty() ? 0.0 : *std::min_element(acc.begin(), acc.end());
  s.mean_seconds = mean_of(seconds);
  return s;
}

BenchmarkReport run_benchmark(const std::vector<NamedSpec>& configs,
                              const BenchmarkOptions& options,
                              const lp::SolverConfig& solver) {
  if (options.replicates < 1) throw Error(ErrorCode::kInvalidArgument, "need at least 1 replicate");
  options.analysis.validate();
  for (const auto& c : configs) c.spec.validate();

  const auto reps = static_cast<std::size_t>(options.replicates);
  BenchmarkReport report;
  report.rows.resize(configs.size() * reps);
  parallel_for(report.rows.size(), options.workers, [&](std::size_t t) {
    report.rows[t] = run_replicate(configs[t / reps], t / reps, static_cast<int>(t % reps),
                                   options, solver);
  });
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const std::vector<ReplicateRow> rows(report.rows.begin() + static_cast<std::ptrdiff_t>(c * reps),
                                         report.rows.begin() + static_cast<std::ptrdiff_t>((c + 1) * reps));
    report.configs.push_back(summarize(configs[c], rows));
  }
  return report;
}

json report_to_json(const BenchmarkReport& report, bool timing) {
  json out;
  out["schema"] = kSchemaVersion;
  json configs = json::array();
  for (const auto& s : report.configs) {
    json c = {{"name", s.config.name},
              {"spec", spec_to_json(s.config.spec)},
              {"replicates", s.replicates},
              {"failures", s.failures},
              {"precision", {{"mean", s.mean_precision}, {"sd", s.sd_precision}}},
              {"recall", {{"mean", s.mean_recall}, {"sd", s.sd_recall}}},
              {"f1", {{"mean", s.mean_f1}, {"sd", s.sd_f1}}},
              {"train_accuracy", {{"mean", s.mean_train_accuracy}, {"min", s.min_train_accuracy}}}};
    if (timing) c["mean_seconds"] = s.mean_seconds;
    configs.push_back(std::move(c));
  }
  out["configs"] = std::move(configs);
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row = {{"config", report.configs[r.config].config.name},
                {"replicate", r.replicate},
                {"data_seed", r.data_seed},
                {"ok", r.ok}};
    if (r.ok) {
      row["tp"] = r.score.tp;
      row["fp"] = r.score.fp;
      row["fn"] = r.score.fn;
      row["precision"] = r.score.precision;
      row["recall"] = r.score.recall;
      row["f1"] = r.score.f1;
      row["train_accuracy"] = r.train_accuracy;
      row["counts"] = {{"strong", r.strong}, {"weak", r.weak}, {"irrelevant", r.irrelevant}};
    } else {
      row["error"] = r.error;
    }
    if (timing) row["seconds"] = r.seconds;
    rows.push_back(std::move(row));
  }
  out["replicates"] = std::move(rows);
  return out;
}

std::string report_to_csv(const BenchmarkReport& report, bool timing) {
  std::ostringstream out;
  out.precision(6);
  out << "config,strong,weak,irrelevant,samples,replicates,failures,precision_mean,precision_sd,"
         "recall_mean,recall_sd,f1_mean,f1_sd,train_accuracy_mean,train_accuracy_min";
  if (timing) out << ",seconds_mean";
  out << '\n';
  for (const auto& s : report.configs) {
    out << s.config.name << ',' << s.config.spec.n_strong << ',' << s.config.spec.n_weak << ','
        << s.config.spec.n_irrelevant << ',' << s.config.spec.n_samples << ',' << s.replicates
        << ',' << s.failures << ',' << s.mean_precision << ',' << s.sd_precision << ','
        << s.mean_recall << ',' << s.sd_recall << ',' << s.mean_f1 << ',' << s.sd_f1 << ','
        << s.mean_train_accuracy << ',' << s.min_train_accuracy;
    if (timing) out << ',' << s.mean_seconds;
    out << '\n';
  }
  return out.str();
}

std::vector<NamedSpec> configs_from_json(const json& j) {
  const json* items = &j;
  if (j.is_object()) {
    const auto it = j.find("configs");
    if (it == j.end()) throw Error(ErrorCode::kSpec, "config file needs a 'configs' array");
    items = &*it;
  }
  if (!items->is_array() || items->empty()) {
    throw Error(ErrorCode::kSpec, "config file must list at least one simulation spec");
  }
  std::vector<NamedSpec> out;
  for (const auto& item : *items) {
    NamedSpec c;
    c.spec = spec_from_json(item);
    if (item.contains("name") && item["name"].is_string()) {
      c.name = item["name"].get<std::string>();
    } else {
      c.name = "config" + std::to_string(out.size() + 1);
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace relint
