#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heavyls/core_types.hpp"
#include "heavyls/noise.hpp"
#include "heavyls/rate_theory.hpp"
#include "heavyls/solvers.hpp"

namespace heavyls {

struct ExperimentSpec {
  ShapeClass cls = ShapeClass::monotone();
  std::string f0 = "zero";  // named truth: zero, linear, square, sine
  Design design = Design::uniform(0);
  NoiseSpec noise;
  std::vector<int> n_grid;
  int reps = 50;
  enum class NormKind { Population, Empirical } norm = NormKind::Population;
  bool misspecified = false;
  std::uint64_t master_seed = 1;
  double phi_log_c = 0.0;      // when > 0, fit with Phi = c sqrt(log n)
  int target_resolution = 4096;  // grid for the misspecified target
  long long fit_budget = 2000000;

  void validate(bool rate_mode) const;
  /// Moment count the noise law guarantees (used for predictions).
  double noise_q() const;
  /// Theory attached to this spec: regime, alpha, s from the class and f0.
  RatePrediction prediction() const;
  std::string prediction_regime() const;
};

struct RateCell {
  int n = 0;
  double mean_error = 0.0, median_error = 0.0, q90_error = 0.0, mc_se = 0.0;
  int solver_failures = 0;
};

struct ExponentFit {
  double slope = 0.0, intercept = 0.0;
  double se = 0.0;  // heteroscedasticity-robust
  double ci_lo = 0.0, ci_hi = 0.0;
};

/// OLS of log(err) on log(n) with HC1-robust standard errors.
ExponentFit loglog_fit(const std::vector<double>& ns,
                       const std::vector<double>& errs);

struct RateReport {
  std::vector<RateCell> per_n;
  std::vector<std::vector<double>> raw_errors;  // [n_index][rep]
  ExponentFit fit;            // slope is the fitted (negative) exponent
  bool fit_skipped = false;   // noiseless runs skip the exponent fit
  double predicted_exponent = 0.0;  // positive e: error ~ n^{-e}
  std::string predicted_regime;
  double verdict_margin = 0.0;  // |fitted_slope + predicted_exponent|
  bool degraded = false;        // >1% solver non-convergence
};

RateReport run_rate_experiment(const ExperimentSpec& spec);

struct TailReport {
  int n = 0, reps = 0;
  double rn = 0.0;
  double predicted_exponent = 0.0;
  std::vector<double> scaled_errors;  // sorted ascending
  std::vector<double> thresholds;     // retained (>= 20 exceedances)
  std::vector<double> survival;
  std::vector<double> dropped_thresholds;
  double hill_index = 0.0;
  int hill_k = 0;
  // gaussian-noise twin over the same thresholds
  std::vector<double> gauss_scaled;
  std::vector<double> gauss_survival;
  double gauss_hill = 0.0;
  bool degraded = false;
};

/// Scaled-error tails at fixed n: survival at the given thresholds, Hill
/// index on the top order statistics, plus a gaussian twin on the same
/// thresholds. hill_k = 0 uses max(20, floor(0.05 reps)).
TailReport run_tail_experiment(const ExperimentSpec& spec, int n,
                               std::vector<double> thresholds, int hill_k = 0);

/// L2(P_X) projection of f0 onto the class at grid resolution: the
/// shape-constrained fit of noiseless f0 samples on m midpoints.
FittedFn misspecified_target(const ShapeClass& cls, const RefFn& f0,
                             int resolution);

/// Hill tail-index estimate from the top k order statistics.
double hill_estimator(const std::vector<double>& values, int k);

}  // namespace heavyls
