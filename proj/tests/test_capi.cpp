#include <relint/relint.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>

#include <json.hpp>

#include "doctest.h"

#include <httplib.h>

using nlohmann::json;

extern "C" int relint_header_c_check(void);

namespace {

// Owns a char* returned by the library.
struct Text {
  char* p = nullptr;
  ~Text() { relint_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

std::string simulated_csv(int n = 120, std::uint64_t seed = 1) {
  relint_simulation_spec spec;
  relint_simulation_spec_init(&spec);
  spec.n_strong = 2;
  spec.n_weak = 2;
  spec.n_irrelevant = 3;
  spec.n_samples = n;
  spec.seed = seed;
  Text data, truth;
  REQUIRE(relint_simulate(&spec, &data.p, &truth.p) == RELINT_OK);
  return data.str();
}

relint_dataset* parse(const std::string& csv) {
  relint_dataset* ds = nullptr;
  REQUIRE(relint_dataset_parse_csv(csv.data(), csv.size(), "label", &ds) == RELINT_OK);
  return ds;
}

}  // namespace

TEST_CASE("version, status names, defaults") {
  CHECK(std::strlen(relint_version()) > 0);
  CHECK(std::string(relint_status_name(RELINT_OK)) == "Ok");
  CHECK(std::string(relint_status_name(RELINT_E_INFEASIBLE)) == "Infeasible");
  CHECK(std::string(relint_status_name(static_cast<relint_status>(99))) == "Unknown");
  CHECK(relint_header_c_check() == 50);
  relint_analyze_params p;
  relint_analyze_params_init(&p);
  CHECK(p.delta == 0.001);
  CHECK(p.coverage == 0.999);
  relint_server_options o;
  relint_server_options_init(&o);
  CHECK(o.cors_origin == nullptr);
  CHECK(o.max_payload_bytes > 0);
}

TEST_CASE("simulate returns data and truth CSV") {
  relint_simulation_spec spec;
  relint_simulation_spec_init(&spec);
  spec.n_strong = 1;
  spec.n_weak = 2;
  spec.n_irrelevant = 1;
  spec.n_samples = 10;
  Text data, truth;
  REQUIRE(relint_simulate(&spec, &data.p, &truth.p) == RELINT_OK);
  CHECK(std::string(relint_last_error()).empty());
  CHECK(data.str().rfind("f1,f2,f3,f4,label\n", 0) == 0);
  CHECK(truth.str() == "feature,class\nf1,2\nf2,1\nf3,1\nf4,0\n");

  spec.n_strong = spec.n_weak = 0;
  Text bad, bad_truth;
  CHECK(relint_simulate(&spec, &bad.p, &bad_truth.p) == RELINT_E_SPEC);
  CHECK(bad.p == nullptr);
  CHECK(relint_simulate(&spec, &bad.p, nullptr) == RELINT_E_INVALID_ARGUMENT);
  CHECK(std::strlen(relint_last_error()) > 0);
}

TEST_CASE("datasets and analysis") {
  const auto csv = simulated_csv();
  relint_dataset* ds = parse(csv);
  CHECK(relint_dataset_samples(ds) == 120);
  CHECK(relint_dataset_features(ds) == 7);

  relint_analyze_params p;
  relint_analyze_params_init(&p);
  p.workers = 1;
  p.seed = 4;
  Text a, b;
  REQUIRE(relint_analyze(ds, &p, &a.p) == RELINT_OK);
  p.workers = 2;
  REQUIRE(relint_analyze(ds, &p, &b.p) == RELINT_OK);
  CHECK(a.str() == b.str());
  const auto j = json::parse(a.str());
  CHECK(j["features"].size() == 7);

  Text c;
  const double top = j["features"][2]["upper"];
  const std::string pin = json{{{"feature", 2}, {"value", top}}}.dump();
  REQUIRE(relint_analyze_constrained(ds, &p, pin.c_str(), &c.p) == RELINT_OK);
  CHECK(json::parse(c.str())["constraints"].size() == 1);

  Text d;
  CHECK(relint_analyze_constrained(ds, &p, "{", &d.p) == RELINT_E_PARSE);
  CHECK(relint_analyze_constrained(ds, &p, R"([{"feature":"nope","value":1}])", &d.p) ==
        RELINT_E_INVALID_ARGUMENT);
  p.n_probes = 1;
  CHECK(relint_analyze(ds, &p, &d.p) == RELINT_E_INVALID_ARGUMENT);
  CHECK(relint_analyze(nullptr, &p, &d.p) == RELINT_E_INVALID_ARGUMENT);
  CHECK(relint_analyze(ds, &p, nullptr) == RELINT_E_INVALID_ARGUMENT);
  CHECK(d.p == nullptr);
  relint_dataset_free(ds);
  relint_dataset_free(nullptr);
}

TEST_CASE("dataset errors") {
  relint_dataset* ds = nullptr;
  CHECK(relint_dataset_load_csv("/nonexistent/x.csv", "label", &ds) == RELINT_E_IO);
  CHECK(std::string(relint_last_error()).find("/nonexistent/x.csv") != std::string::npos);
  CHECK(ds == nullptr);
  const std::string one = "a,label\n1,1\n2,1\n";
  CHECK(relint_dataset_parse_csv(one.data(), one.size(), "label", &ds) == RELINT_E_LABEL);
  CHECK(relint_dataset_parse_csv(one.data(), one.size(), "nolabel", &ds) != RELINT_OK);
  CHECK(relint_dataset_parse_csv(nullptr, 0, "label", &ds) == RELINT_E_INVALID_ARGUMENT);

  const auto path = std::filesystem::temp_directory_path() / "relint_capi.csv";
  std::ofstream(path) << simulated_csv(40);
  CHECK(relint_dataset_load_csv(path.c_str(), "label", &ds) == RELINT_OK);
  CHECK(relint_dataset_samples(ds) == 40);
  relint_dataset_free(ds);
  std::filesystem::remove(path);
}

TEST_CASE("benchmark through the C API") {
  relint_benchmark_options o;
  relint_benchmark_options_init(&o);
  o.replicates = 1;
  o.workers = 1;
  const char* configs = R"([{"name":"small","n_strong":2,"n_weak":2,"n_irrelevant":2,"n_samples":80}])";
  Text j, csv;
  int failed = -1;
  REQUIRE(relint_benchmark(configs, &o, &j.p, &csv.p, &failed) == RELINT_OK);
  CHECK(failed == 0);
  CHECK(json::parse(j.str())["configs"][0]["name"] == "small");
  CHECK(csv.str().find("\nsmall,2,2,2,80,1,0,") != std::string::npos);
  CHECK(relint_benchmark("[]", &o, &j.p, nullptr, nullptr) == RELINT_E_SPEC);
  CHECK(relint_benchmark("not json", &o, nullptr, nullptr, nullptr) == RELINT_E_PARSE);
}

TEST_CASE("server lifecycle") {
  relint_server_options o;
  relint_server_options_init(&o);
  o.workers = 1;
  relint_server* server = nullptr;
  REQUIRE(relint_server_create(&o, &server) == RELINT_OK);
  int port = 0;
  REQUIRE(relint_server_bind(server, "127.0.0.1", 0, &port) == RELINT_OK);
  CHECK(port > 0);
  relint_status run_status = RELINT_E_INTERNAL;
  std::thread t([&] { run_status = relint_server_run(server); });

  httplib::Client c("127.0.0.1", port);
  c.set_read_timeout(60, 0);
  const auto h = c.Get("/health");
  REQUIRE(h);
  CHECK(h->status == 200);
  const auto csv = simulated_csv(60);
  const auto r = c.Post("/sessions", csv, "text/csv");
  REQUIRE(r);
  CHECK(r->status == 201);

  relint_server* second = nullptr;
  REQUIRE(relint_server_create(&o, &second) == RELINT_OK);
  int other = 0;
  CHECK(relint_server_bind(second, "127.0.0.1", port, &other) == RELINT_E_IO);
  relint_server_free(second);

  relint_server_stop(server);
  t.join();
  CHECK(run_status == RELINT_OK);
  relint_server_free(server);

  o.static_dir = "/nonexistent/static";
  CHECK(relint_server_create(&o, &server) == RELINT_E_IO);
  o.static_dir = nullptr;
  o.session_ttl_seconds = 0;
  CHECK(relint_server_create(&o, &server) == RELINT_E_INVALID_ARGUMENT);
  CHECK(relint_server_create(nullptr, nullptr) == RELINT_E_INVALID_ARGUMENT);
  // NULL options take the defaults.
  REQUIRE(relint_server_create(nullptr, &server) == RELINT_OK);
  relint_server_free(server);
}
