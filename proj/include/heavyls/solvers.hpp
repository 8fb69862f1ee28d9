#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "heavyls/core_types.hpp"

namespace heavyls {

struct SolveReport {
  double objective = 0.0;      // final 1/2 ||y - theta||^2 over the raw points
  double kkt_residual = 0.0;   // max of feasibility / dual / stationarity gaps
  int iterations = 0;
  enum class Status { Converged, MaxIter, Infeasible } status = Status::Converged;
};

std::string solve_status_name(SolveReport::Status s);

struct FitResult {
  FittedFn fn;
  SolveReport report;
};

// Exact least squares over nondecreasing vectors (weighted PAVA after tie
// merging). With `bound`, the fit is the projection onto
// {monotone} ∩ {|theta| <= bound} via Dykstra alternating projections.
FitResult fit_isotonic(const Sample& sample, std::optional<double> bound = {});

// Least squares under spacing-aware nonnegative second differences,
// (t_{i+1}-t_i)/(x_{i+1}-x_i) >= (t_i-t_{i-1})/(x_i-x_{i-1}). Requires at
// least 3 distinct abscissae. Output uses the left-continuous piecewise
// linear extension with the first/last segment extrapolated.
FitResult fit_convex(const Sample& sample, std::optional<double> bound = {});

// Least squares under |t_i - t_j| <= lip * |x_i - x_j|^gamma. Adjacent gaps
// suffice for gamma = 1; all pairs are imposed for gamma < 1 (n capped at
// 2000 in that case).
FitResult fit_holder(const Sample& sample, double gamma, double lip,
                     std::optional<double> bound = {});

// Dispatch on a ShapeClass; `bound` overrides the class phi when set.
FitResult fit_shape(const Sample& sample, const ShapeClass& cls,
                    std::optional<double> bound = {});

struct ConeConstraint {
  enum class Kind { Monotone, ConvexSecondDifference } kind =
      Kind::Monotone;
  std::vector<double> abscissae;  // convex kind uses these spacings
};

// Weighted Euclidean projection onto the cone; equals weighted PAVA for the
// monotone cone. Idempotent.
std::vector<double> project_cone(const std::vector<double>& v,
                                 const ConeConstraint& cone,
                                 const std::vector<double>& weights);

// --- lower level pieces (shared with envelope_lab and the tests) ---

// Weighted isotonic regression, pool adjacent violators.
std::vector<double> pava(const std::vector<double>& v,
                         const std::vector<double>& w);

struct ProjOutcome {
  std::vector<double> theta;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = true;
};

// Projection onto the convex-second-difference cone (weighted, spacing-aware)
// by a primal active-set method.
ProjOutcome project_convex_cone(const std::vector<double>& v,
                                const std::vector<double>& w,
                                const std::vector<double>& x,
                                int max_iterations = 100000);

// Projection onto {theta : lo_k <= theta_{k+1} - theta_k <= hi_k}.
ProjOutcome project_chain(const std::vector<double>& v,
                          const std::vector<double>& w,
                          const std::vector<double>& lo,
                          const std::vector<double>& hi,
                          int max_iterations = 100000);

// Projection onto {theta : |theta_i - theta_j| <= bound(i,j) for all i < j}.
ProjOutcome project_pairwise(const std::vector<double>& v,
                             const std::vector<double>& w,
                             const std::function<double(int, int)>& bound,
                             int max_iterations = 100000);

// Dykstra-corrected alternating projections between an exact set projector
// and the box [-phi, phi]; converges to the projection of v onto the
// intersection. Tolerance is a fixed-point gap on successive iterates.
struct DykstraOutcome {
  std::vector<double> point;
  int sweeps = 0;
  bool converged = true;
};
DykstraOutcome dykstra_box(
    const std::function<std::vector<double>(const std::vector<double>&)>&
        project_set,
    double phi, const std::vector<double>& v, double tol = 1e-9,
    int max_sweeps = 20000);

// Tie handling: merge equal abscissae into one knot with weight =
// multiplicity and response = weighted mean (preserves the LS objective).
struct MergedSample {
  std::vector<double> x, y, w;
  double tie_ss = 0.0;  // within-tie sum of squares, constant in theta
};
MergedSample merge_ties(const Sample& sample);

}  // namespace heavyls
