#include "classify.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "error.hpp"
#include "parallel.hpp"

namespace relint {

ProbeResult generate_probes(const Dataset& dataset, const BaselineModel& baseline,
                            int n_probes, double delta, std::uint64_t seed, int workers,
                            const lp::SolverConfig& solver) {
  if (n_probes < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 probes");
  const Eigen::Index d = dataset.num_features();
  const Eigen::Index n = dataset.num_samples();
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "dataset has no features");

  // Draw every permutation up front so results do not depend on scheduling.
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, d - 1);
  std::vector<int> sources(static_cast<std::size_t>(n_probes));
  std::vector<std::vector<Eigen::Index>> orders(static_cast<std::size_t>(n_probes));
  for (int k = 0; k < n_probes; ++k) {
    sources[k] = static_cast<int>(pick(rng));
    auto& order = orders[k];
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    for (Eigen::Index i = n - 1; i > 0; --i) {
      std::uniform_int_distribution<Eigen::Index> draw(0, i);
      std::swap(order[i], order[draw(rng)]);
    }
  }

  BaselineModel extended = baseline;
  extended.weights.conservativeResize(d + 1);
  extended.weights[d] = 0.0;

  // Feasible start shared by every probe: the probe column enters at zero.
  const ModelClass base(dataset, baseline, delta, {}, solver);

  std::vector<std::optional<double>> values(static_cast<std::size_t>(n_probes));
  parallel_for(static_cast<std::size_t>(n_probes), workers, [&](std::size_t k) {
    Eigen::VectorXd column(n);
    for (Eigen::Index i = 0; i < n; ++i) column[i] = dataset.samples(orders[k][i], sources[k]);
    Dataset probe = dataset.append_column(column, "probe");
    probe.standardized = true;
    try {
      const ModelClass model(probe, extended, delta, {}, solver, &base);
      const auto up = model.max_signed(d, 1.0);
      const auto down = model.max_signed(d, -1.0);
      if (up || down) {
        values[k] = std::max(up ? up->value : 0.0, down ? down->value : 0.0);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kBudgetExceeded) throw;
    }
  });

  ProbeResult out;
  out.n_probes = n_probes;
  out.seed = seed;
  for (int k = 0; k < n_probes; ++k) {
    if (values[k]) {
      out.probe_values.push_back(*values[k]);
      out.source_features.push_back(sources[k]);
    } else {
      ++out.skipped;
    }
  }
  if (out.skipped * 10 > n_probes) {
    throw Error(ErrorCode::kOptimizationFailure,
                std::to_string(out.skipped) + " of " + std::to_string(n_probes) +
                    " probes failed to solve");
  }
  return out;
}

PredictionInterval prediction_interval(const std::vector<double>& values, double p) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kDegenerateDistribution,
                "prediction interval needs at least 2 probe values");
  }
  if (!(p > 0.5 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "coverage p must lie in (0.5, 1)");
  }
  const auto n = static_cast<double>(values.size());
  // Sorted so the sums do not depend on probe order.
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();

  PredictionInterval pi;
  pi.p = p;
  pi.t_quantile =
      boost::math::quantile(boost::math::students_t_distribution<double>(n - 1.0), p);
  if (lo == hi) {
    pi.mean = pi.lower = pi.upper = lo;
    return pi;
  }
  pi.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : sorted) ss += (v - pi.mean) * (v - pi.mean);
  pi.sd = std::sqrt(ss / (n - 1.0));
  const double half = pi.t_quantile * pi.sd * std::sqrt(1.0 + 1.0 / n);
  pi.lower = pi.mean - half;
  pi.upper = pi.mean + half;
  return pi;
}

PredictionInterval prediction_interval(const ProbeResult& probes, double p) {
  return prediction_interval(probes.probe_values, p);
}

int RelevanceClasses::count(RelevanceClass c) const {
  return static_cast<int>(std::count(classes.begin(), classes.end(), c));
}

RelevanceClasses classify_features(const RelevanceIntervals& intervals,
                                   const PredictionInterval& pi, double strong_tolerance) {
  RelevanceClasses out;
  out.threshold = pi.upper;
  out.strong_tolerance = strong_tolerance;
  for (Eigen::Index j = 0; j < intervals.size(); ++j) {
    RelevanceClass c = RelevanceClass::kIrrelevant;
    if (intervals.ok(j) && intervals.upper[j] > pi.upper) {
      c = intervals.lower_normalized(j) > strong_tolerance ? RelevanceClass::kStrong
                                                           : RelevanceClass::kWeak;
    }
    out.classes.push_back(c);
  }
  return out;
}

std::string to_string(RelevanceClass c) {
  switch (c) {
    case RelevanceClass::kIrrelevant: return "irrelevant";
    case RelevanceClass::kWeak: return "weak";
    case RelevanceClass::kStrong: return "strong";
  }
  return "unknown";
}

}  // namespace relint
