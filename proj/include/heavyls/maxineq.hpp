#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heavyls/noise.hpp"

namespace heavyls {

struct MaxIneqConfig {
  int n = 100;        // rows
  int p = 16;         // columns
  double q = 2.0;     // moment order used by the bound, >= 2
  NoiseLaw entry_law = NoiseLaw::Gaussian;  // gaussian or sym_pareto
  double law_param = 3.0;                   // sym_pareto tail index
  std::string col_scale = "equal";          // "equal" or "decaying"
  std::uint64_t seed = 1;
  void validate() const;
  std::vector<double> scales() const;  // per-column scale multipliers
};

/// sqrt(6 V log(1+p)) + sqrt(2) (3 log(1+p))^{1-1/q} (2 sum_xi_q)^{1/q}.
double bound_b1(double V, double logp1, double q, double sum_xi_q);

/// E[(max_j |X_j|)^q] for one row with independent standardized entries
/// scaled per column; deterministic quadrature on the exact law survival
/// (not sample moments).
double analytic_row_max_moment(const MaxIneqConfig& config, double q);

struct VerifyResult {
  MaxIneqConfig config;
  double mc_estimate = 0.0;  // E max_j |sum_i X_ij| by Monte Carlo
  double v_np = 0.0;         // max_j sum_i E X_ij^2
  double sum_xi_q = 0.0;     // sum_i E xi_i^q (analytic)
  double bound = 0.0;
  double bound_lemma8 = 0.0;  // log(1+p)-scaled comparison bound
  double slack = 0.0;         // bound - mc_estimate
};

/// Monte Carlo check that the finite-maximum bound dominates the expected
/// maximum. A negative slack is an implementation bug, not a finding, and
/// raises InvariantViolation.
VerifyResult verify_b1(const MaxIneqConfig& config, int reps);

/// Growth of E[max_{j<=N} |G_n(eps f_j)|] for a bounded dictionary
/// f_j(x) = cos(2 pi j x) with gaussian noise: linear in sqrt(log N).
struct GrowthRegression {
  std::vector<int> sizes;
  std::vector<double> emax;
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};
GrowthRegression maxstat_growth(const std::vector<int>& sizes, int n, int reps,
                                std::uint64_t seed);

}  // namespace heavyls
