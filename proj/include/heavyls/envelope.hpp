#pragma once

#include <string>
#include <vector>

#include "heavyls/core_types.hpp"

namespace heavyls {

/// Center function f0 for a local envelope; the closed forms need to know
/// whether it is constant or linear.
struct Center {
  std::string name;
  RefFn fn;
  bool is_constant = false;
  double value = 0.0;
  bool is_linear = false;

  static Center zero();
  static Center constant(double c);
  static Center linear(double a0, double a1);
  // "zero", "linear", "square", "sine"
  static Center named(const std::string& name);
};

/// Closed-form local envelope F_delta(x). Supported pairs: monotone class
/// with constant center (unit sup bound), convex class with any center
/// (requires phi), Lipschitz class (gamma = 1; x-free sup-norm bound).
/// Throws CapabilityError for unsupported pairs, pointing to the oracle.
double envelope_analytic(const ShapeClass& cls, const Center& center,
                         double delta, double x,
                         const Design& measure = Design::uniform(0));

/// Grid oracle for F_delta(x): maximizes |g(x)| over the discretized class
/// shifted by the center, intersected with the grid L2 ball of radius delta
/// and the class sup bound. Pure-cone cases use the Moreau identity; when
/// the sup bound binds, the value comes from bisection on the penalty
/// multiplier with Dykstra projections inside.
double envelope_oracle(const ShapeClass& cls, const Center& center,
                       double delta, double x, int grid_m,
                       const Design& measure = Design::uniform(0));

struct EnvelopeProfile {
  ShapeClass cls;
  std::string center;
  std::vector<double> deltas;
  std::vector<double> norm_sup, norm_l2, norm_l3;
  std::string norm_used = "l2";
  double s_hat = 0.0, nu_hat = 0.0, r2 = 0.0;
};

/// Default delta grid: 12 points, geometric from 0.01 to 0.5.
std::vector<double> default_delta_grid();

/// Envelope norms over the midpoint grid for each delta. x_stride evaluates
/// the envelope on every stride-th grid point (norms use matching weights).
EnvelopeProfile envelope_profile(const ShapeClass& cls, const Center& center,
                                 const std::vector<double>& deltas, int grid_m,
                                 int x_stride = 1,
                                 const Design& measure = Design::uniform(0));

struct GrowthFit {
  double s_hat = 0.0;
  double nu_hat = 0.0;  // log-power correction
  double r2 = 0.0;
};

/// Least squares of log(norm) = const + s log(delta) + nu log log(1/delta).
/// Requires >= 6 deltas spanning at least one decade.
GrowthFit fit_growth_exponent(const std::vector<double>& deltas,
                              const std::vector<double>& norms);
GrowthFit fit_growth_exponent(EnvelopeProfile& profile,
                              const std::string& norm = "l2");

// ---------------------------------------------------------------------------
// Interpolation inequality checks
// ---------------------------------------------------------------------------

struct InterpolationReport {
  std::string family;
  int samples = 0;
  int violations = 0;
  double max_ratio = 0.0;      // max over samples of ||f||_inf / bound
  double worst_sup = 0.0;      // ||f||_inf at the max ratio
  double worst_bound = 0.0;
};

/// ||f||_inf <= 2 ||f||_2^{2/3} L^{1/3} over random piecewise-linear members
/// of the L-Lipschitz ball.
InterpolationReport check_interpolation_lipschitz(double lip, int samples,
                                                  std::uint64_t seed);

/// ||f||_inf <= 5 d ||f||_2^{c} L^{1-c}, c = 2/3 (gamma = 1), for additive
/// f(x) = sum_j f_j(x_j) with each f_j in the L-Lipschitz ball.
InterpolationReport check_interpolation_additive(int d, double lip,
                                                 int samples,
                                                 std::uint64_t seed);

/// ||m o B - m0 o B0||_inf <= 10 ||.||^{2/3} L^{1/3} with p = 1 indices on
/// orthogonal coordinate axes (density lower bound 1).
InterpolationReport check_interpolation_multiple_index(double lip, int samples,
                                                       std::uint64_t seed);

}  // namespace heavyls
