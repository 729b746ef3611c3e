#include <algorithm>
#include <random>

#include "analysis.hpp"
#include "baseline.hpp"
#include "bounds.hpp"
#include "classify.hpp"
#include "doctest.h"
#include "error.hpp"
#include "support.hpp"

using namespace relint;
using relint::testing::make_dataset;
using relint::testing::reference_interval;

namespace {

RelevanceIntervals intervals_of(std::vector<double> lower, std::vector<double> upper,
                                double mu) {
  RelevanceIntervals iv;
  iv.lower = Eigen::Map<Eigen::VectorXd>(lower.data(), static_cast<Eigen::Index>(lower.size()));
  iv.upper = Eigen::Map<Eigen::VectorXd>(upper.data(), static_cast<Eigen::Index>(upper.size()));
  iv.normalization = mu;
  iv.constrained.assign(lower.size(), false);
  iv.errors.assign(lower.size(), "");
  return iv;
}

PredictionInterval threshold_at(double upper) {
  PredictionInterval pi;
  pi.upper = upper;
  return pi;
}

}  // namespace

TEST_CASE("prediction interval matches a high-precision t reference") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(2, 120);
  std::uniform_real_distribution<double> coverage(0.51, 0.9995);
  std::lognormal_distribution<double> value(0.0, 1.0);
  for (int r = 0; r < 100; ++r) {
    std::vector<double> v(static_cast<std::size_t>(size(rng)));
    for (auto& x : v) x = value(rng);
    const double p = r == 0 ? 0.999 : coverage(rng);
    const auto pi = prediction_interval(v, p);
    const auto ref = reference_interval(v, p);
    CAPTURE(v.size());
    CAPTURE(p);
    const auto close = [](double a, long double b) {
      return std::fabs(static_cast<long double>(a) - b) <= 1e-9L * std::max(1.0L, std::fabs(b));
    };
    CHECK(close(pi.t_quantile, ref.t));
    CHECK(close(pi.mean, ref.mean));
    CHECK(close(pi.sd, ref.sd));
    CHECK(close(pi.lower, ref.lower));
    CHECK(close(pi.upper, ref.upper));
    CHECK(pi.lower <= pi.mean);
    CHECK(pi.mean <= pi.upper);
    CHECK(pi.upper - pi.lower ==
          doctest::Approx(2.0 * pi.t_quantile * pi.sd * std::sqrt(1.0 + 1.0 / v.size())));
  }
}

TEST_CASE("equal probe values collapse the interval exactly") {
  const std::vector<double> v(50, 0.4375);
  const auto pi = prediction_interval(v, 0.999);
  CHECK(pi.sd == 0.0);
  CHECK(pi.lower == 0.4375);
  CHECK(pi.upper == 0.4375);
  CHECK(pi.mean == 0.4375);
}

TEST_CASE("probe order does not matter") {
  std::vector<double> v;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 50; ++i) v.push_back(u(rng));
  const auto a = prediction_interval(v, 0.999);
  std::shuffle(v.begin(), v.end(), rng);
  const auto b = prediction_interval(v, 0.999);
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
}

TEST_CASE("prediction interval argument errors") {
  try {
    prediction_interval(std::vector<double>{1.0}, 0.999);
    FAIL("expected DegenerateDistribution");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateDistribution);
  }
  CHECK_THROWS_AS(prediction_interval(std::vector<double>{1.0, 2.0}, 0.5), Error);
  CHECK_THROWS_AS(prediction_interval(std::vector<double>{1.0, 2.0}, 1.0), Error);
  CHECK(kDefaultCoverage == 0.999);
  CHECK(kDefaultProbes == 50);
}

TEST_CASE("classification rules") {
  // strong, weak, irrelevant, below the band, errored
  auto iv = intervals_of({0.5, 0.0, 0.0, 0.0, 0.4}, {1.0, 0.8, 0.1, 0.01, 0.9}, 2.0);
  iv.errors[4] = "failed";
  const auto cls = classify_features(iv, threshold_at(0.2));
  CHECK(cls.classes == std::vector<RelevanceClass>{RelevanceClass::kStrong, RelevanceClass::kWeak,
                                                   RelevanceClass::kIrrelevant,
                                                   RelevanceClass::kIrrelevant,
                                                   RelevanceClass::kIrrelevant});
  CHECK(cls.threshold == 0.2);
  CHECK(cls.count(RelevanceClass::kStrong) + cls.count(RelevanceClass::kWeak) +
            cls.count(RelevanceClass::kIrrelevant) ==
        5);
  // Upper exactly at the threshold is irrelevant.
  CHECK(classify_features(iv, threshold_at(0.8)).classes[1] == RelevanceClass::kIrrelevant);
  // Lower bound below the tolerance (normalized) is not strong.
  auto tiny = intervals_of({1e-5}, {1.0}, 1.0);
  CHECK(classify_features(tiny, threshold_at(0.1)).classes[0] == RelevanceClass::kWeak);
  CHECK(classify_features(tiny, threshold_at(0.1), 1e-6).classes[0] == RelevanceClass::kStrong);
  CHECK(to_string(RelevanceClass::kWeak) == "weak");
}

TEST_CASE("raising the threshold never makes a feature relevant") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int r = 0; r < 50; ++r) {
    std::vector<double> lo, hi;
    for (int j = 0; j < 20; ++j) {
      const double a = u(rng), b = u(rng);
      lo.push_back(u(rng) < 0.5 ? 0.0 : std::min(a, b));
      hi.push_back(std::max(a, b));
    }
    const auto iv = intervals_of(lo, hi, 1.0);
    const double t1 = u(rng), t2 = t1 + u(rng);
    const auto a = classify_features(iv, threshold_at(t1));
    const auto b = classify_features(iv, threshold_at(t2));
    for (std::size_t j = 0; j < 20; ++j) {
      if (a.classes[j] == RelevanceClass::kIrrelevant) CHECK(b.classes[j] == RelevanceClass::kIrrelevant);
    }
  }
}

TEST_CASE("probes on all-constant columns are identical") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(20, 3, 4.0);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) y[i] = i < 10 ? 1.0 : -1.0;
  const auto ds = standardize(make_dataset(x, y));
  const auto base = fit_l1_svm(ds, 1.0);
  const auto probes = generate_probes(ds, base, 10, 0.001, 3, 1);
  REQUIRE(probes.probe_values.size() == 10);
  for (double v : probes.probe_values) CHECK(v == probes.probe_values[0]);
  CHECK(prediction_interval(probes, 0.999).sd == 0.0);
}

TEST_CASE("probes: deterministic, worker independent, below strong features") {
  SimulationSpec spec;
  spec.n_samples = 300;
  spec.random_seed = 14;
  const auto ds = standardize(simulate(spec).dataset);
  const auto base = fit_l1_svm(ds, 1.0);
  const auto a = generate_probes(ds, base, 50, 0.001, 99, 1);
  const auto b = generate_probes(ds, base, 50, 0.001, 99, 3);
  CHECK(a.probe_values == b.probe_values);
  CHECK(a.source_features == b.source_features);
  CHECK(a.skipped == 0);
  CHECK(a.n_probes == 50);
  for (double v : a.probe_values) CHECK(v >= 0.0);
  for (int s : a.source_features) {
    CHECK(s >= 0);
    CHECK(s < ds.num_features());
  }
  CHECK(generate_probes(ds, base, 50, 0.001, 100, 1).probe_values != a.probe_values);

  const auto iv = compute_all(ds, base, 0.001, {}, 1);
  double mean = 0;
  for (double v : a.probe_values) mean += v;
  mean /= 50;
  double strongest_min = iv.upper[0];
  for (int j = 0; j < 4; ++j) strongest_min = std::min(strongest_min, iv.upper[j]);
  CHECK(mean < strongest_min);
}

TEST_CASE("probe count below two is rejected") {
  SimulationSpec spec;
  spec.n_samples = 60;
  const auto ds = standardize(simulate(spec).dataset);
  const auto base = fit_l1_svm(ds, 1.0);
  CHECK_THROWS_AS(generate_probes(ds, base, 1, 0.001, 0, 1), Error);
}

TEST_CASE("sole predictor is strong, duplicated pair weak, noise irrelevant") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    AnalyzeParams params;
    params.seed = seed;
    params.workers = 1;
    const auto r = analyze(relint::testing::recovery_instance(seed), params);
    CAPTURE(seed);
    CHECK(r.classes.classes[0] == RelevanceClass::kStrong);
    CHECK(r.classes.classes[1] == RelevanceClass::kWeak);
    CHECK(r.classes.classes[2] == RelevanceClass::kWeak);
    CHECK(r.classes.classes[3] == RelevanceClass::kIrrelevant);
  }
}
