#include <relint/relint.h>

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <pthread.h>

namespace {

constexpr int kDefaultPort = 8080;

struct Failure {
  int exit_code;
};

// Optimization-side failures exit 2, everything else 1.
int exit_code_for(relint_status status) {
  switch (status) {
    case RELINT_E_NUMERICAL:
    case RELINT_E_INFEASIBLE:
    case RELINT_E_OPTIMIZATION:
    case RELINT_E_DEGENERATE:
    case RELINT_E_BUDGET:
    case RELINT_E_MALFORMED_PROBLEM: return 2;
    default: return 1;
  }
}

void check(relint_status status) {
  if (status == RELINT_OK) return;
  std::cerr << "relint: " << relint_status_name(status) << ": " << relint_last_error() << '\n';
  throw Failure{exit_code_for(status)};
}

[[noreturn]] void die(const std::string& message) {
  std::cerr << "relint: " << message << '\n';
  throw Failure{1};
}

// Owns a string handed out by the library.
struct Text {
  char* p = nullptr;
  ~Text() { relint_string_free(p); }
  std::string_view view() const { return p == nullptr ? std::string_view() : std::string_view(p); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
    die("cannot write '" + path + "'");
  }
}

// "-" or empty means stdout.
void emit(const std::string& path, std::string_view text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
  } else {
    write_file(path, text);
  }
}

void add_analysis_flags(CLI::App* cmd, relint_analyze_params& params, bool with_seed = true) {
  cmd->add_option("--delta", params.delta, "Model-class relaxation")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--pi-p", params.coverage, "Prediction interval coverage")
      ->check(CLI::Range(0.5, 1.0))
      ->capture_default_str();
  cmd->add_option("--probes", params.n_probes, "Number of probe features")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  if (with_seed) cmd->add_option("--seed", params.seed, "Random seed")->capture_default_str();
  cmd->add_option("--workers", params.workers, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

struct AnalyzeArgs {
  std::string input;
  std::string label = "label";
  std::string output;
  std::string constraints;
  relint_analyze_params params{};
};

int cmd_analyze(const AnalyzeArgs& a) {
  relint_dataset* raw = nullptr;
  check(relint_dataset_load_csv(a.input.c_str(), a.label.c_str(), &raw));
  std::unique_ptr<relint_dataset, decltype(&relint_dataset_free)> ds(raw, relint_dataset_free);
  Text json;
  if (a.constraints.empty()) {
    check(relint_analyze(ds.get(), &a.params, &json.p));
  } else {
    const std::string body = read_file(a.constraints);
    check(relint_analyze_constrained(ds.get(), &a.params, body.c_str(), &json.p));
  }
  emit(a.output, json.view());
  return 0;
}

struct SimulateArgs {
  relint_simulation_spec spec{};
  std::string prefix = "sim";
};

int cmd_simulate(const SimulateArgs& a) {
  Text data, truth;
  check(relint_simulate(&a.spec, &data.p, &truth.p));
  write_file(a.prefix + ".csv", data.view());
  write_file(a.prefix + ".truth.csv", truth.view());
  std::cerr << "wrote " << a.prefix << ".csv and " << a.prefix << ".truth.csv\n";
  return 0;
}

struct BenchmarkArgs {
  relint_benchmark_options options{};
  std::string configs;
  std::string output;
  std::string csv;
};

int cmd_benchmark(const BenchmarkArgs& a) {
  std::string configs;
  if (!a.configs.empty()) configs = read_file(a.configs);
  Text json, csv;
  int all_failed = 0;
  check(relint_benchmark(a.configs.empty() ? nullptr : configs.c_str(), &a.options, &json.p,
                         &csv.p, &all_failed));
  emit(a.output, json.view());
  if (!a.csv.empty()) emit(a.csv, csv.view());
  if (all_failed != 0) {
    std::cerr << "relint: at least one configuration failed on every replicate\n";
    return 2;
  }
  return 0;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  std::optional<int> port;
  std::string static_dir;
  std::string cors = "*";
  relint_server_options options{};
};

int resolve_port(const std::optional<int>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("RELINT_PORT"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0 || v > 65535) die(std::string("invalid RELINT_PORT '") + env + "'");
    return static_cast<int>(v);
  }
  return kDefaultPort;
}

int cmd_serve(ServeArgs a) {
  const int port = resolve_port(a.port);
  a.options.cors_origin = a.cors.c_str();
  a.options.static_dir = a.static_dir.empty() ? nullptr : a.static_dir.c_str();

  // Signals are taken by a dedicated thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  relint_server* raw = nullptr;
  check(relint_server_create(&a.options, &raw));
  std::unique_ptr<relint_server, decltype(&relint_server_free)> server(raw, relint_server_free);
  int bound = 0;
  check(relint_server_bind(server.get(), a.host.c_str(), port, &bound));
  std::cerr << "relint: listening on http://" << a.host << ':' << bound << '\n';

  std::thread([s = server.get(), signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    relint_server_stop(s);
  }).detach();
  check(relint_server_run(server.get()));
  std::cerr << "relint: stopped\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature relevance intervals for linear classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", relint_version());

  AnalyzeArgs analyze;
  relint_analyze_params_init(&analyze.params);
  auto* a = app.add_subcommand("analyze", "Relevance intervals and classes of a CSV");
  a->add_option("input", analyze.input, "CSV file with header")->required();
  a->add_option("--label", analyze.label, "Label column")->capture_default_str();
  a->add_option("-o,--output", analyze.output, "Output JSON (default stdout)");
  a->add_option("--constraints", analyze.constraints, "JSON constraint set to apply");
  add_analysis_flags(a, analyze.params);

  SimulateArgs simulate;
  relint_simulation_spec_init(&simulate.spec);
  auto* s = app.add_subcommand("simulate", "Generate data with known relevance");
  s->add_option("--strong", simulate.spec.n_strong)->check(CLI::NonNegativeNumber)->capture_default_str();
  s->add_option("--weak", simulate.spec.n_weak)->check(CLI::NonNegativeNumber)->capture_default_str();
  s->add_option("--irrelevant", simulate.spec.n_irrelevant)->check(CLI::NonNegativeNumber)->capture_default_str();
  s->add_option("--samples", simulate.spec.n_samples)->capture_default_str();
  s->add_option("--seed", simulate.spec.seed)->capture_default_str();
  s->add_option("--group-size", simulate.spec.weak_group_size, "Members per weak group")->capture_default_str();
  s->add_option("--jitter", simulate.spec.weak_jitter, "Sd of weak member jitter")->capture_default_str();
  s->add_option("--flip", simulate.spec.label_flip_rate, "Label noise rate")->capture_default_str();
  s->add_option("-o,--output", simulate.prefix, "Output prefix")->capture_default_str();

  BenchmarkArgs bench;
  relint_benchmark_options_init(&bench.options);
  auto* b = app.add_subcommand("benchmark", "Score selection on simulated configurations");
  b->add_option("--configs", bench.configs, "JSON list of simulation specs");
  b->add_option("--replicates", bench.options.replicates)->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("--seed", bench.options.seed, "Seed of data generation and analyses")->capture_default_str();
  b->add_option("-o,--output", bench.output, "Report JSON (default stdout)");
  b->add_option("--csv", bench.csv, "Summary CSV, one row per config");
  b->add_flag("--timing", bench.options.timing, "Record wall-clock times");
  add_analysis_flags(b, bench.options.analysis, false);
  b->get_option("--workers")->description("Replicates run at once (0 = all cores)");

  ServeArgs serve;
  relint_server_options_init(&serve.options);
  auto* v = app.add_subcommand("serve", "HTTP session service");
  v->add_option("--host", serve.host)->capture_default_str();
  v->add_option("--port", serve.port, "Port (default $RELINT_PORT, then 8080)")->check(CLI::Range(0, 65535));
  v->add_option("--static", serve.static_dir, "Directory served under /");
  v->add_option("--cors-origin", serve.cors, "Access-Control-Allow-Origin, empty disables")->capture_default_str();
  v->add_option("--ttl", serve.options.session_ttl_seconds, "Idle session lifetime in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  v->add_option("--budget-ms", serve.options.request_budget_ms, "Time budget per fit or recompute")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  v->add_option("--max-payload", serve.options.max_payload_bytes, "Upload limit in bytes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  v->add_option("--workers", serve.options.workers)->check(CLI::NonNegativeNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*a) return cmd_analyze(analyze);
    if (*s) return cmd_simulate(simulate);
    if (*b) return cmd_benchmark(bench);
    if (*v) return cmd_serve(serve);
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return 1;
}
