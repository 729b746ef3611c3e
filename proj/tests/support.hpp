#pragma once

// Independent oracles and fixed constructions shared by the unit tests and
// the acceptance runner. Nothing here calls the LP solver.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "data.hpp"

namespace relint::testing {

inline Dataset make_dataset(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Dataset ds;
  ds.samples = x;
  ds.labels = y;
  for (Eigen::Index j = 0; j < x.cols(); ++j) ds.feature_names.push_back("f" + std::to_string(j + 1));
  return ds;
}

inline long double t_log_norm(int nu) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double v = nu;
  return std::lgamma((v + 1.0L) / 2.0L) - std::lgamma(v / 2.0L) - 0.5L * std::log(v * pi);
}

inline long double t_pdf(long double t, int nu) {
  const long double v = nu;
  return std::exp(t_log_norm(nu) - (v + 1.0L) / 2.0L * std::log1p(t * t / v));
}

// Student t density integrated over [0, t] after u = tan(x), Simpson rule in
// long double. Returns the CDF at t.
inline long double t_cdf(long double t, int nu) {
  const auto integrand = [&](long double x) {
    const long double c = std::cos(x);
    return t_pdf(std::tan(x), nu) / (c * c);
  };
  const long double upper = std::atan(std::fabs(t));
  const int steps = 20000;
  const long double h = upper / steps;
  long double sum = integrand(0.0L) + integrand(upper);
  for (int k = 1; k < steps; ++k) sum += integrand(k * h) * (k % 2 == 1 ? 4.0L : 2.0L);
  const long double half = sum * h / 3.0L;
  return t >= 0 ? 0.5L + half : 0.5L - half;
}

// p-quantile (p > 0.5): bracket by doubling, then Newton steps kept inside
// the bracket.
inline long double t_quantile(long double p, int nu) {
  long double lo = 0.0L, hi = 1.0L;
  while (t_cdf(hi, nu) < p) {
    lo = hi;
    hi *= 2.0L;
  }
  long double t = 0.5L * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const long double f = t_cdf(t, nu) - p;
    (f < 0 ? lo : hi) = t;
    long double next = t - f / t_pdf(t, nu);
    if (!(next > lo && next < hi)) next = 0.5L * (lo + hi);
    const long double step = std::fabs(next - t);
    t = next;
    if (step <= 1e-16L * t) break;
  }
  return t;
}

struct ReferenceInterval {
  long double mean = 0, sd = 0, t = 0, lower = 0, upper = 0;
};

inline ReferenceInterval reference_interval(const std::vector<double>& values, double p) {
  ReferenceInterval r;
  const auto n = static_cast<long double>(values.size());
  for (double v : values) r.mean += v;
  r.mean /= n;
  long double ss = 0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.sd = std::sqrt(ss / (n - 1));
  r.t = t_quantile(p, static_cast<int>(values.size()) - 1);
  const long double half = r.t * r.sd * std::sqrt(1.0L + 1.0L / n);
  r.lower = r.mean - half;
  r.upper = r.mean + half;
  return r;
}

// min over b of sum_i max(0, 1 - y_i (s_i - b)); convex piecewise linear in
// b, so a kink is optimal.
inline double min_hinge_over_bias(const Eigen::VectorXd& scores, const Eigen::VectorXd& y) {
  const Eigen::Index n = scores.size();
  // Slope is -(#negatives) far left and every kink adds one.
  std::vector<double> kinks(static_cast<std::size_t>(n));
  int negatives = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    kinks[static_cast<std::size_t>(i)] = y[i] > 0 ? scores[i] - 1.0 : scores[i] + 1.0;
    if (y[i] < 0) ++negatives;
  }
  const auto k = static_cast<std::size_t>(std::max(negatives - 1, 0));
  std::nth_element(kinks.begin(), kinks.begin() + static_cast<std::ptrdiff_t>(k), kinks.end());
  const double b = kinks[k];
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += std::max(0.0, 1.0 - y[i] * (scores[i] - b));
  return total;
}

struct GridBounds {
  Eigen::Vector3d min_abs;
  Eigen::Vector3d max_abs;
  long feasible_points = 0;
};

// Brute force over w on a grid inside the L1 ball of radius `budget`; a point
// counts when some bias keeps the hinge sum within `rho`. The spacing is the
// largest value <= max_step that divides the budget, so the ball's faces
// carry grid points.
inline GridBounds grid_bounds(const Dataset& ds, double budget, double rho, double max_step) {
  GridBounds g;
  const double step = budget / std::ceil(budget / max_step);
  budget *= 1.0 + 1e-12;
  g.min_abs.setConstant(std::numeric_limits<double>::infinity());
  g.max_abs.setConstant(-1.0);
  const int m = static_cast<int>(std::floor(budget / step));
  const Eigen::MatrixXd& x = ds.samples;
  Eigen::VectorXd w(3);
  for (int a = -m; a <= m; ++a) {
    const int ra = m - std::abs(a);
    for (int b = -ra; b <= ra; ++b) {
      const int rb = ra - std::abs(b);
      for (int c = -rb; c <= rb; ++c) {
        w << a * step, b * step, c * step;
        if (w.lpNorm<1>() > budget) continue;
        if (min_hinge_over_bias(x * w, ds.labels) > rho + 1e-12) continue;
        ++g.feasible_points;
        for (int j = 0; j < 3; ++j) {
          g.min_abs[j] = std::min(g.min_abs[j], std::abs(w[j]));
          g.max_abs[j] = std::max(g.max_abs[j], std::abs(w[j]));
        }
      }
    }
  }
  return g;
}

// Standardized Gaussian features with labels from a random hyperplane plus noise.
inline Dataset random_instance(std::uint64_t seed, int n, int d, double noise) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = normal(rng);
  Eigen::VectorXd w(d);
  for (int j = 0; j < d; ++j) w[j] = normal(rng);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = x.row(i).dot(w) + noise * normal(rng) >= 0 ? 1.0 : -1.0;
  if ((y.array() > 0).all()) y[0] = -1.0;
  if ((y.array() < 0).all()) y[0] = 1.0;
  return standardize(make_dataset(x, y));
}

// Separable labels from two latent signals: column 0 carries the first alone,
// columns 1 and 2 are identical copies of the second, column 3 is pure noise.
inline Dataset recovery_instance(std::uint64_t seed, int n = 200) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.5, 1.0);
  const double a1 = weight(rng), a2 = weight(rng);
  Eigen::MatrixXd x(n, 4);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double z1 = normal(rng), z2 = normal(rng);
    x(i, 0) = z1;
    x(i, 1) = z2;
    x(i, 2) = z2;
    x(i, 3) = normal(rng);
    y[i] = a1 * z1 + a2 * z2 >= 0.0 ? 1.0 : -1.0;
  }
  return make_dataset(x, y);
}

// Four strong features, one weak trio of identical columns (5-7), one noise
// feature (8).
inline Dataset weak_trio_instance(std::uint64_t seed, int n = 300) {
  SimulationSpec spec;
  spec.n_strong = 4;
  spec.n_weak = 3;
  spec.n_irrelevant = 1;
  spec.n_samples = n;
  spec.weak_group_size = 3;
  spec.random_seed = seed;
  return simulate(spec).dataset;
}

}  // namespace relint::testing
