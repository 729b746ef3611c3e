#include "relint/relint.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "analysis.hpp"
#include "benchmark.hpp"
#include "data.hpp"
#include "error.hpp"
#include "report.hpp"
#include "service.hpp"

struct relint_dataset {
  relint::Dataset data;
};

struct relint_server {
  std::unique_ptr<relint::Service> service;
};

namespace {

thread_local std::string last_error;

relint_status to_status(relint::ErrorCode code) {
  using relint::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return RELINT_E_INVALID_ARGUMENT;
    case ErrorCode::kMalformedProblem: return RELINT_E_MALFORMED_PROBLEM;
    case ErrorCode::kNumericalFailure: return RELINT_E_NUMERICAL;
    case ErrorCode::kIo: return RELINT_E_IO;
    case ErrorCode::kParse: return RELINT_E_PARSE;
    case ErrorCode::kLabel: return RELINT_E_LABEL;
    case ErrorCode::kSpec: return RELINT_E_SPEC;
    case ErrorCode::kFold: return RELINT_E_FOLD;
    case ErrorCode::kDimension: return RELINT_E_DIMENSION;
    case ErrorCode::kInfeasible: return RELINT_E_INFEASIBLE;
    case ErrorCode::kOptimizationFailure: return RELINT_E_OPTIMIZATION;
    case ErrorCode::kDegenerateDistribution: return RELINT_E_DEGENERATE;
    case ErrorCode::kBudgetExceeded: return RELINT_E_BUDGET;
    case ErrorCode::kNotFound: return RELINT_E_NOT_FOUND;
  }
  return RELINT_E_INTERNAL;
}

relint_status fail(relint_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs fn, turning exceptions into a status plus last_error.
template <class Fn>
relint_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return RELINT_OK;
  } catch (const relint::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(RELINT_E_PARSE, std::string("invalid JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(RELINT_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RELINT_E_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  auto* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

relint::AnalyzeParams to_params(const relint_analyze_params* p) {
  relint::AnalyzeParams params;
  if (p != nullptr) {
    params.delta = p->delta;
    params.coverage = p->coverage;
    params.n_probes = p->n_probes;
    params.seed = p->seed;
    params.workers = p->workers;
  }
  params.validate();
  return params;
}

void require(const void* ptr, const char* what) {
  if (ptr == nullptr) {
    throw relint::Error(relint::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
  }
}

}  // namespace

extern "C" {

const char* relint_version(void) { return "0.1.0"; }

const char* relint_status_name(relint_status status) {
  switch (status) {
    case RELINT_OK: return "Ok";
    case RELINT_E_INVALID_ARGUMENT: return "InvalidArgument";
    case RELINT_E_MALFORMED_PROBLEM: return "MalformedProblem";
    case RELINT_E_NUMERICAL: return "NumericalFailure";
    case RELINT_E_IO: return "IoError";
    case RELINT_E_PARSE: return "ParseError";
    case RELINT_E_LABEL: return "LabelError";
    case RELINT_E_SPEC: return "SpecError";
    case RELINT_E_FOLD: return "FoldError";
    case RELINT_E_DIMENSION: return "DimensionError";
    case RELINT_E_INFEASIBLE: return "Infeasible";
    case RELINT_E_OPTIMIZATION: return "OptimizationFailure";
    case RELINT_E_DEGENERATE: return "DegenerateDistribution";
    case RELINT_E_BUDGET: return "BudgetExceeded";
    case RELINT_E_NOT_FOUND: return "NotFound";
    case RELINT_E_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* relint_last_error(void) { return last_error.c_str(); }

void relint_string_free(char* text) { delete[] text; }

void relint_analyze_params_init(relint_analyze_params* params) {
  if (params == nullptr) return;
  const relint::AnalyzeParams d;
  params->delta = d.delta;
  params->coverage = d.coverage;
  params->n_probes = d.n_probes;
  params->seed = d.seed;
  params->workers = d.workers;
}

void relint_simulation_spec_init(relint_simulation_spec* spec) {
  if (spec == nullptr) return;
  const relint::SimulationSpec d;
  spec->n_strong = d.n_strong;
  spec->n_weak = d.n_weak;
  spec->n_irrelevant = d.n_irrelevant;
  spec->n_samples = d.n_samples;
  spec->seed = d.random_seed;
  spec->weak_group_size = d.weak_group_size;
  spec->weak_jitter = d.weak_jitter;
  spec->label_flip_rate = d.label_flip_rate;
}

void relint_benchmark_options_init(relint_benchmark_options* options) {
  if (options == nullptr) return;
  const relint::BenchmarkOptions d;
  options->replicates = d.replicates;
  options->seed = d.seed;
  options->workers = d.workers;
  options->timing = 0;
  relint_analyze_params_init(&options->analysis);
}

void relint_server_options_init(relint_server_options* options) {
  if (options == nullptr) return;
  const relint::ServiceOptions d;
  options->session_ttl_seconds = d.session_ttl.count();
  options->request_budget_ms = d.request_budget.count();
  options->max_payload_bytes = d.max_payload;
  options->cors_origin = nullptr;
  options->static_dir = nullptr;
  options->workers = d.workers;
}

relint_status relint_dataset_load_csv(const char* path, const char* label_column,
                                      relint_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(label_column, "label_column");
    require(out, "out");
    *out = nullptr;
    auto ds = std::make_unique<relint_dataset>();
    ds->data = relint::load_csv(path, label_column);
    *out = ds.release();
  });
}

relint_status relint_dataset_parse_csv(const char* text, size_t length, const char* label_column,
                                       relint_dataset** out) {
  return guarded([&] {
    require(text, "text");
    require(label_column, "label_column");
    require(out, "out");
    *out = nullptr;
    auto ds = std::make_unique<relint_dataset>();
    ds->data = relint::parse_csv(std::string_view(text, length), label_column);
    *out = ds.release();
  });
}

int64_t relint_dataset_samples(const relint_dataset* dataset) {
  return dataset == nullptr ? 0 : static_cast<int64_t>(dataset->data.num_samples());
}

int64_t relint_dataset_features(const relint_dataset* dataset) {
  return dataset == nullptr ? 0 : static_cast<int64_t>(dataset->data.num_features());
}

void relint_dataset_free(relint_dataset* dataset) { delete dataset; }

relint_status relint_analyze(const relint_dataset* dataset, const relint_analyze_params* params,
                             char** json_out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(json_out, "json_out");
    *json_out = nullptr;
    const auto result = relint::analyze(dataset->data, to_params(params));
    *json_out = copy_string(relint::dump(relint::analysis_to_json(result)));
  });
}

relint_status relint_analyze_constrained(const relint_dataset* dataset,
                                         const relint_analyze_params* params,
                                         const char* constraints_json, char** json_out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(constraints_json, "constraints_json");
    require(json_out, "json_out");
    *json_out = nullptr;
    const auto p = to_params(params);
    const auto body = nlohmann::json::parse(constraints_json);
    const auto result = relint::analyze(dataset->data, p);
    const auto constraints = relint::constraints_from_json(body, result);
    const auto constrained = relint::apply_constraints(result, constraints, p.workers);
    *json_out = copy_string(relint::dump(relint::constrained_to_json(result, constrained)));
  });
}

relint_status relint_simulate(const relint_simulation_spec* spec, char** data_csv_out,
                              char** truth_csv_out) {
  return guarded([&] {
    require(spec, "spec");
    require(data_csv_out, "data_csv_out");
    require(truth_csv_out, "truth_csv_out");
    *data_csv_out = *truth_csv_out = nullptr;
    relint::SimulationSpec s;
    s.n_strong = spec->n_strong;
    s.n_weak = spec->n_weak;
    s.n_irrelevant = spec->n_irrelevant;
    s.n_samples = spec->n_samples;
    s.random_seed = spec->seed;
    s.weak_group_size = spec->weak_group_size;
    s.weak_jitter = spec->weak_jitter;
    s.label_flip_rate = spec->label_flip_rate;
    const auto sim = relint::simulate(s);
    auto data = std::unique_ptr<char[]>(copy_string(relint::to_csv(sim.dataset)));
    auto truth = std::unique_ptr<char[]>(copy_string(relint::ground_truth_csv(sim.dataset, sim.truth)));
    *data_csv_out = data.release();
    *truth_csv_out = truth.release();
  });
}

relint_status relint_benchmark(const char* configs_json, const relint_benchmark_options* options,
                               char** json_out, char** csv_out, int* all_failed) {
  return guarded([&] {
    require(options, "options");
    if (json_out != nullptr) *json_out = nullptr;
    if (csv_out != nullptr) *csv_out = nullptr;
    const auto configs = configs_json == nullptr
                             ? relint::standard_configs()
                             : relint::configs_from_json(nlohmann::json::parse(configs_json));
    relint::BenchmarkOptions o;
    o.replicates = options->replicates;
    o.seed = options->seed;
    o.workers = options->workers;
    o.analysis = to_params(&options->analysis);
    const auto report = relint::run_benchmark(configs, o);
    const bool timing = options->timing != 0;
    std::unique_ptr<char[]> json, csv;
    if (json_out != nullptr) json.reset(copy_string(relint::dump(relint::report_to_json(report, timing))));
    if (csv_out != nullptr) csv.reset(copy_string(relint::report_to_csv(report, timing)));
    if (all_failed != nullptr) {
      *all_failed = 0;
      for (const auto& c : report.configs) {
        if (c.failures == c.replicates) *all_failed = 1;
      }
    }
    if (json_out != nullptr) *json_out = json.release();
    if (csv_out != nullptr) *csv_out = csv.release();
  });
}

relint_status relint_server_create(const relint_server_options* options, relint_server** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    relint::ServiceOptions o;
    if (options != nullptr) {
      if (options->session_ttl_seconds <= 0 || options->request_budget_ms <= 0 ||
          options->max_payload_bytes == 0) {
        throw relint::Error(relint::ErrorCode::kInvalidArgument,
                            "ttl, budget and payload limit must be positive");
      }
      o.session_ttl = std::chrono::seconds(options->session_ttl_seconds);
      o.request_budget = std::chrono::milliseconds(options->request_budget_ms);
      o.max_payload = options->max_payload_bytes;
      if (options->cors_origin != nullptr) o.cors_origin = options->cors_origin;
      if (options->static_dir != nullptr) o.static_dir = options->static_dir;
      o.workers = options->workers;
    }
    auto server = std::make_unique<relint_server>();
    server->service = std::make_unique<relint::Service>(std::move(o));
    *out = server.release();
  });
}

relint_status relint_server_bind(relint_server* server, const char* host, int port,
                                 int* bound_port) {
  return guarded([&] {
    require(server, "server");
    require(host, "host");
    if (port < 0 || port > 65535) {
      throw relint::Error(relint::ErrorCode::kInvalidArgument, "port out of range");
    }
    const int p = server->service->bind(host, port);
    if (bound_port != nullptr) *bound_port = p;
  });
}

relint_status relint_server_run(relint_server* server) {
  return guarded([&] {
    require(server, "server");
    server->service->run();
  });
}

void relint_server_stop(relint_server* server) {
  if (server != nullptr) server->service->stop();
}

void relint_server_free(relint_server* server) { delete server; }

}  // extern "C"
