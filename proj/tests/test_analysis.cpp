#include <set>

#include "analysis.hpp"
#include "doctest.h"
#include "error.hpp"
#include "report.hpp"
#include "support.hpp"

using namespace relint;
using nlohmann::json;

namespace {

Dataset sim1(std::uint64_t seed, int n = 200) {
  SimulationSpec spec;
  spec.n_samples = n;
  spec.random_seed = seed;
  return simulate(spec).dataset;
}

AnalyzeParams params_with(std::uint64_t seed, int workers) {
  AnalyzeParams p;
  p.seed = seed;
  p.workers = workers;
  return p;
}

}  // namespace

TEST_CASE("parameter validation") {
  AnalyzeParams p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.delta == 0.001);
  CHECK(p.coverage == 0.999);
  CHECK(p.n_probes == 50);
  p.delta = -1e-3;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.coverage = 0.5;
  CHECK_THROWS_AS(p.validate(), Error);
  p.coverage = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.n_probes = 1;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("derived seeds differ per stream and per seed") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 20; ++s)
    for (std::uint64_t k = 0; k < 5; ++k) seen.insert(derive_seed(s, k));
  CHECK(seen.size() == 100);
  CHECK(derive_seed(7, 2) == derive_seed(7, 2));
}

TEST_CASE("analysis JSON is identical for 1 and 4 workers and across runs") {
  const auto raw = sim1(3);
  const auto a = dump(analysis_to_json(analyze(raw, params_with(5, 1))));
  const auto b = dump(analysis_to_json(analyze(raw, params_with(5, 4))));
  const auto c = dump(analysis_to_json(analyze(raw, params_with(5, 1))));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(dump(analysis_to_json(analyze(raw, params_with(6, 1)))) != a);
}

TEST_CASE("analysis JSON layout") {
  const auto r = analyze(sim1(4), params_with(1, 0));
  const auto j = analysis_to_json(r);
  CHECK(j["schema"] == 1);
  for (const char* k : {"C", "mu", "rho", "cv_score"}) CHECK(j["baseline"].contains(k));
  CHECK(j["threshold"].get<double>() == r.pi.upper);
  CHECK(j["prediction_interval"]["n_probes"] == 50);
  REQUIRE(j["features"].size() == 30);
  int total = 0;
  for (const auto& f : j["features"]) {
    for (const char* k : {"name", "lower", "upper", "lower_norm", "upper_norm", "class"}) {
      CHECK(f.contains(k));
    }
    CHECK(f["lower"].get<double>() >= 0.0);
    CHECK(f["lower"].get<double>() <= f["upper"].get<double>() + 1e-9);
    CHECK(f["upper_norm"].get<double>() == doctest::Approx(f["upper"].get<double>() / r.baseline.mu));
    ++total;
  }
  CHECK(j["counts"]["strong"].get<int>() + j["counts"]["weak"].get<int>() +
            j["counts"]["irrelevant"].get<int>() ==
        total);
  CHECK(j["features"][0]["name"] == "f1");
  CHECK(j["features"][0]["class"] == 2);
  CHECK(j["features"][0]["relevance"] == "strong");
  const auto text = dump(j);
  CHECK(text.back() == '\n');
  CHECK(json::parse(text) == j);
}

TEST_CASE("constraints from JSON") {
  const auto r = analyze(sim1(6, 120), params_with(2, 0));
  const double mu = r.baseline.mu;
  SUBCASE("names, indices, values and ranges") {
    const auto k = constraints_from_json(
        json::parse(R"({"constraints":[{"feature":"f5","value":0.5},{"feature":2,"min":0.1,"max":0.2}]})"),
        r);
    REQUIRE(k.size() == 2);
    CHECK(k.at(4).min == 0.5);
    CHECK(k.at(4).max == 0.5);
    CHECK(k.at(2).min == 0.1);
    CHECK(k.at(2).max == 0.2);
  }
  SUBCASE("bare array and normalized units") {
    const auto k = constraints_from_json(
        json::parse(R"({"normalized":true,"constraints":[{"feature":"f1","min":0.1,"max":0.2}]})"), r);
    CHECK(k.at(0).min == doctest::Approx(0.1 * mu));
    CHECK(k.at(0).max == doctest::Approx(0.2 * mu));
    CHECK(constraints_from_json(json::parse(R"([{"feature":0,"value":0}])"), r).size() == 1);
    CHECK(constraints_from_json(json::parse(R"([])"), r).empty());
  }
  SUBCASE("malformed bodies") {
    for (const char* body :
         {R"({})", R"({"constraints":5})", R"([{"value":1}])", R"([{"feature":"nope","value":1}])",
          R"([{"feature":99,"value":1}])", R"([{"feature":0,"min":0.3,"max":0.1}])",
          R"([{"feature":0,"value":-1}])", R"([{"feature":0}])", R"([{"feature":0,"value":"x"}])",
          R"([{"feature":0,"value":1},{"feature":"f1","value":2}])", R"([3])",
          R"({"constraints":[],"normalized":"yes"})"}) {
      CAPTURE(body);
      try {
        constraints_from_json(json::parse(body), r);
        FAIL("accepted");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kInvalidArgument);
      }
    }
  }
}

TEST_CASE("constraints leave the stored analysis untouched") {
  const auto r = analyze(testing::weak_trio_instance(2), params_with(1, 1));
  const auto before = dump(analysis_to_json(r));
  const double top = r.intervals.upper[4];
  const auto c = apply_constraints(r, {{4, {top, top}}}, 1);
  CHECK(dump(analysis_to_json(r)) == before);
  CHECK(c.classes.threshold == r.pi.upper);
  CHECK(c.intervals.upper_normalized(5) < 1e-3);
  CHECK(c.intervals.upper_normalized(6) < 1e-3);
  const auto j = constrained_to_json(r, c);
  CHECK(j["constraints"][0]["feature"] == "f5");
  CHECK(j["constraints"][0]["index"] == 4);
  CHECK(j["features"][4]["constrained"] == true);
  CHECK(j["features"][5]["constrained"] == false);
  CHECK(j["features"][5]["error"].is_null());
  CHECK(j["features"][5]["relevance"] == "irrelevant");
}

TEST_CASE("infeasible constraints surface as Infeasible") {
  const auto r = analyze(testing::weak_trio_instance(3, 150), params_with(1, 1));
  const double big = 3.0 * r.baseline.mu;
  try {
    apply_constraints(r, {{0, {big, big}}}, 1);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasible);
  }
}

TEST_CASE("params and spec JSON round trip") {
  AnalyzeParams p;
  p.delta = 0.01;
  p.coverage = 0.95;
  p.n_probes = 30;
  p.seed = 18446744073709551615ULL;
  const auto q = params_from_json(params_to_json(p));
  CHECK(q.delta == p.delta);
  CHECK(q.coverage == p.coverage);
  CHECK(q.n_probes == p.n_probes);
  CHECK(q.seed == p.seed);
  CHECK(q.c_grid == p.c_grid);
  CHECK_THROWS_AS(params_from_json(json{{"p", 2.0}}), Error);
  CHECK_THROWS_AS(params_from_json(json{{"n_probes", "many"}}), Error);

  SimulationSpec s;
  s.n_strong = 3;
  s.n_weak = 6;
  s.weak_group_size = 3;
  s.random_seed = 12;
  const auto t = spec_from_json(spec_to_json(s));
  CHECK(spec_to_json(t) == spec_to_json(s));
  CHECK(spec_from_json(json{{"n_strong", 2}}).n_weak == SimulationSpec{}.n_weak);
  try {
    spec_from_json(json{{"n_strong", 0}, {"n_weak", 0}});
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSpec);
  }
  CHECK_THROWS_AS(spec_from_json(json::array()), Error);
}

TEST_CASE("ground-truth recovery on seeded noiseless constructions") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = analyze(testing::recovery_instance(100 + seed), params_with(seed, 1));
    CAPTURE(seed);
    CHECK(r.classes.classes[0] == RelevanceClass::kStrong);
    CHECK(r.classes.classes[1] == RelevanceClass::kWeak);
    CHECK(r.classes.classes[2] == RelevanceClass::kWeak);
    CHECK(std::abs(r.intervals.upper[1] - r.intervals.upper[2]) < 1e-6);
    CHECK(r.intervals.lower[1] < 1e-6);
    CHECK(r.intervals.lower[2] < 1e-6);
    CHECK(r.classes.classes[3] == RelevanceClass::kIrrelevant);
  }
}
