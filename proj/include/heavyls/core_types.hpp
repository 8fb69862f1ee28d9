#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace heavyls {

// Error taxonomy. The CLI maps ArgumentError/ConfigError to exit code 1,
// SolveError to 2 and InvariantViolation to 3.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Design: a distribution for the abscissae on [0,1].
// ---------------------------------------------------------------------------

enum class DesignKind { Uniform01, Grid01, CustomDensity };

struct Design {
  DesignKind kind = DesignKind::Uniform01;
  int npoints = 0;
  std::uint64_t seed = 0;
  std::string density_name;  // CustomDensity only

  static Design uniform(int npoints, std::uint64_t seed = 0);
  static Design grid(int npoints);
  // Throws ConfigError unless the named density integrates to 1 over [0,1]
  // within 1e-6 (checked by quadrature). Known names: "tilted", "cosbump".
  static Design custom(const std::string& density_name, int npoints,
                       std::uint64_t seed = 0);

  // Sorted abscissae in [0,1]. Grid01 is deterministic midpoints (i+1/2)/n.
  std::vector<double> draw() const { return draw(seed); }
  std::vector<double> draw(std::uint64_t stream_seed) const;
  std::vector<double> draw_n(int n, std::uint64_t stream_seed) const;

  double density(double x) const;  // dP_X/dx; Grid01 treated as uniform
  double cdf(double x) const;      // P_X[0,x]
};

// ---------------------------------------------------------------------------
// Sample: one regression dataset.
// ---------------------------------------------------------------------------

struct Sample {
  std::vector<double> x;  // nondecreasing
  std::vector<double> y;
  bool has_ties = false;
  std::string truth_name;     // generating f0, when known
  std::string noise_summary;  // generating noise, when known

  // Sorts by x, flags ties, validates len(x) == len(y) >= 2 and x in [0,1].
  static Sample from_xy(std::vector<double> x, std::vector<double> y);
  int size() const { return static_cast<int>(x.size()); }
};

// ---------------------------------------------------------------------------
// ShapeClass: declarative description of the function class.
// ---------------------------------------------------------------------------

enum class ShapeKind { Monotone, Convex, Holder };

struct ShapeClass {
  ShapeKind kind = ShapeKind::Monotone;
  std::optional<double> phi;  // uniform sup-norm bound
  double gamma = 1.0;         // Holder only, in (0,1]
  double lip = 1.0;           // Holder only, > 0

  static ShapeClass monotone(std::optional<double> phi = {});
  static ShapeClass convex(std::optional<double> phi = {});
  static ShapeClass holder(double gamma, double lip,
                           std::optional<double> phi = {});
  void validate() const;
  std::string name() const;
};

// ---------------------------------------------------------------------------
// FittedFn: piecewise representation of an estimate on [0,1].
// ---------------------------------------------------------------------------

enum class Extension { PiecewiseConstantLeft, PiecewiseLinearLeftContinuous };

struct FittedFn {
  std::vector<double> knots;  // sorted, strictly increasing
  std::vector<double> values;
  Extension extension = Extension::PiecewiseConstantLeft;

  double operator()(double t) const;

  // The function restricted to (lo, hi] is a + b*t. Segments cover [0,1]
  // (first segment is the closed interval [0, hi]).
  struct Segment {
    double lo, hi, a, b;
  };
  std::vector<Segment> segments() const;

  static FittedFn step(std::vector<double> knots, std::vector<double> values);
  static FittedFn linear(std::vector<double> knots, std::vector<double> values);
};

// ---------------------------------------------------------------------------
// RefFn: a reference function, optionally with an exact piecewise-polynomial
// description (degree <= 2 per piece) that enables exact L2 integration.
// ---------------------------------------------------------------------------

struct RefFn {
  struct Piece {
    double lo, hi;          // piece covers (lo, hi]
    double c0, c1, c2;      // c0 + c1*t + c2*t^2
  };
  std::function<double(double)> eval;
  std::vector<Piece> pieces;  // empty: not piecewise polynomial
  std::string label;

  bool is_piecewise_poly() const { return !pieces.empty(); }
  double operator()(double t) const { return eval(t); }

  static RefFn zero();
  static RefFn constant(double c);
  static RefFn linear(double a0, double a1);       // a0 + a1*t
  static RefFn quadratic(double c0, double c1, double c2);
  static RefFn from_fitted(const FittedFn& f);
  static RefFn callable(std::function<double(double)> f, std::string label = "callable");
  // Named truths: "zero", "linear" (x), "square" (x^2), "sine" (sin 2*pi*x).
  static RefFn named(const std::string& name);
};

// ---------------------------------------------------------------------------
// L2 geometry.
// ---------------------------------------------------------------------------

struct L2Method {
  enum class Kind { ExactPiecewise, Quadrature } kind = Kind::ExactPiecewise;
  int order = 5;     // Gauss-Legendre points per panel (quadrature only)
  int panels = 128;  // quadrature only

  static L2Method exact() { return {}; }
  static L2Method quadrature(int order, int panels) {
    return {Kind::Quadrature, order, panels};
  }
};

// Population L2 distance || f - g || under the design measure. Exact
// segment-wise integration when f and g are piecewise polynomial of degree
// <= 2 per segment and the measure is uniform; fixed-order Gauss per segment
// otherwise. Throws EvaluationError if g evaluates to a non-finite value.
double population_l2_distance(const FittedFn& f, const RefFn& g,
                              const Design& measure,
                              L2Method method = L2Method::exact());

// sqrt(mean_i (f(x_i) - g(x_i))^2). Throws ArgumentError on empty x.
double empirical_l2_distance(const FittedFn& f, const RefFn& g,
                             const std::vector<double>& x);

// Thin wrapper matching the domain vocabulary: a norm is a measure plus an
// integration method.
struct L2Norm {
  Design measure;
  L2Method method = L2Method::exact();
  double distance(const FittedFn& f, const RefFn& g) const {
    return population_l2_distance(f, g, measure, method);
  }
};

}  // namespace heavyls
