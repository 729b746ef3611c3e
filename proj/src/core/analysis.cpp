#include "analysis.hpp"

#include <cmath>

#include "error.hpp"

namespace relint {

void AnalyzeParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(delta >= 0.0) || !std::isfinite(delta)) fail("delta must be a finite value >= 0");
  if (!(coverage > 0.5 && coverage < 1.0)) fail("p must lie in (0.5, 1)");
  if (n_probes < 2) fail("at least 2 probes are needed");
  if (folds < 2) fail("at least 2 folds are needed");
  if (c_grid.empty()) fail("C grid is empty");
  for (double c : c_grid) {
    if (!(c > 0.0) || !std::isfinite(c)) fail("C grid values must be positive");
  }
  if (!(strong_tolerance >= 0.0)) fail("strong tolerance must be >= 0");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

AnalysisResult analyze(const Dataset& raw, const AnalyzeParams& params,
                       const lp::SolverConfig& solver) {
  params.validate();
  raw.validate();
  AnalysisResult out;
  out.params = params;
  out.data = standardize(raw, &out.scaling);
  out.baseline = fit_baseline(out.data, params.c_grid, params.folds, derive_seed(params.seed, 1),
                              params.workers, solver, &out.cv);
  out.intervals = compute_all(out.data, out.baseline, params.delta, {}, params.workers, solver);
  out.probes = generate_probes(out.data, out.baseline, params.n_probes, params.delta,
                               derive_seed(params.seed, 2), params.workers, solver);
  out.pi = prediction_interval(out.probes, params.coverage);
  out.classes = classify_features(out.intervals, out.pi, params.strong_tolerance);
  return out;
}

ConstrainedResult apply_constraints(const AnalysisResult& analysis,
                                    const ConstraintSet& constraints, int workers,
                                    const lp::SolverConfig& solver) {
  ConstrainedResult out;
  out.constraints = constraints;
  out.intervals = compute_all(analysis.data, analysis.baseline, analysis.params.delta,
                              constraints, workers, solver);
  out.classes = classify_features(out.intervals, analysis.pi, analysis.params.strong_tolerance);
  return out;
}

}  // namespace relint
