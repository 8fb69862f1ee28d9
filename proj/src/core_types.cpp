#include "heavyls/core_types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "heavyls/rng.hpp"

namespace heavyls {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double custom_density_eval(const std::string& name, double x) {
  if (name == "tilted") return 0.2 + 1.6 * x;
  if (name == "cosbump") return 1.0 + 0.5 * std::cos(kTwoPi * x);
  throw ConfigError("unknown custom density: " + name);
}

// Composite Simpson on [0,1]; enough for the smooth built-in densities.
double simpson01(const std::function<double(double)>& f, int panels) {
  const double h = 1.0 / panels;
  double acc = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = i * h, b = a + h;
    acc += (h / 6.0) * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  }
  return acc;
}

// Nodes/weights for Gauss-Legendre on [-1,1], orders used by the norms.
struct GaussRule {
  std::vector<double> nodes, weights;
};

GaussRule gauss_rule(int order) {
  // Newton iteration on Legendre polynomials; order is small (<= 32).
  GaussRule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = order * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const GaussRule& cached_rule(int order) {
  static thread_local int cached_order = -1;
  static thread_local GaussRule rule;
  if (cached_order != order) {
    rule = gauss_rule(order);
    cached_order = order;
  }
  return rule;
}

}  // namespace

// ---------------------------------------------------------------------------
// Design
// ---------------------------------------------------------------------------

Design Design::uniform(int npoints, std::uint64_t seed) {
  if (npoints < 0) throw ArgumentError("Design: npoints must be nonnegative");
  return {DesignKind::Uniform01, npoints, seed, ""};
}

Design Design::grid(int npoints) {
  if (npoints < 0) throw ArgumentError("Design: npoints must be nonnegative");
  return {DesignKind::Grid01, npoints, 0, ""};
}

Design Design::custom(const std::string& density_name, int npoints,
                      std::uint64_t seed) {
  if (npoints < 0) throw ArgumentError("Design: npoints must be nonnegative");
  const double mass = simpson01(
      [&](double x) { return custom_density_eval(density_name, x); }, 512);
  if (std::abs(mass - 1.0) > 1e-6) {
    throw ConfigError("custom density '" + density_name +
                      "' does not integrate to 1 on [0,1]");
  }
  return {DesignKind::CustomDensity, npoints, seed, density_name};
}

double Design::density(double x) const {
  if (x < 0.0 || x > 1.0) return 0.0;
  switch (kind) {
    case DesignKind::Uniform01:
    case DesignKind::Grid01:
      return 1.0;
    case DesignKind::CustomDensity:
      return custom_density_eval(density_name, x);
  }
  return 1.0;
}

double Design::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  switch (kind) {
    case DesignKind::Uniform01:
    case DesignKind::Grid01:
      return x;
    case DesignKind::CustomDensity: {
      const int panels = std::max(8, static_cast<int>(std::ceil(256 * x)));
      const double h = x / panels;
      double acc = 0.0;
      for (int i = 0; i < panels; ++i) {
        const double a = i * h, b = a + h;
        acc += (h / 6.0) * (density(a) + 4.0 * density(0.5 * (a + b)) + density(b));
      }
      return acc;
    }
  }
  return x;
}

std::vector<double> Design::draw(std::uint64_t stream_seed) const {
  return draw_n(npoints, stream_seed);
}

std::vector<double> Design::draw_n(int n, std::uint64_t stream_seed) const {
  std::vector<double> xs(static_cast<std::size_t>(std::max(n, 0)));
  switch (kind) {
    case DesignKind::Grid01: {
      for (int i = 0; i < n; ++i) xs[i] = (i + 0.5) / n;
      return xs;
    }
    case DesignKind::Uniform01: {
      Rng rng(stream_seed);
      for (int i = 0; i < n; ++i) xs[i] = std::min(rng.uniform(), 1.0);
      std::sort(xs.begin(), xs.end());
      return xs;
    }
    case DesignKind::CustomDensity: {
      // Inverse CDF from a tabulated prefix integral.
      constexpr int kTable = 4096;
      std::vector<double> cum(kTable + 1, 0.0);
      const double h = 1.0 / kTable;
      for (int i = 0; i < kTable; ++i) {
        const double a = i * h, b = a + h;
        cum[i + 1] = cum[i] + (h / 6.0) * (density(a) +
                                           4.0 * density(0.5 * (a + b)) +
                                           density(b));
      }
      const double total = cum[kTable];
      Rng rng(stream_seed);
      for (int i = 0; i < n; ++i) {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        const int j = std::max<int>(1, static_cast<int>(it - cum.begin())) - 1;
        const double frac = (u - cum[j]) / std::max(cum[j + 1] - cum[j], 1e-300);
        xs[i] = std::min((j + frac) * h, 1.0);
      }
      std::sort(xs.begin(), xs.end());
      return xs;
    }
  }
  return xs;
}

// ---------------------------------------------------------------------------
// Sample
// ---------------------------------------------------------------------------

Sample Sample::from_xy(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size()) throw ArgumentError("Sample: len(x) != len(y)");
  if (x.size() < 2) throw ArgumentError("Sample: need at least 2 points");
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  Sample s;
  s.x.reserve(x.size());
  s.y.reserve(y.size());
  for (std::size_t i : idx) {
    s.x.push_back(x[i]);
    s.y.push_back(y[i]);
  }
  for (double v : s.x) {
    if (!(v >= 0.0 && v <= 1.0))
      throw ArgumentError("Sample: abscissae must lie in [0,1]");
  }
  for (std::size_t i = 1; i < s.x.size(); ++i) {
    if (s.x[i] == s.x[i - 1]) {
      s.has_ties = true;
      break;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// ShapeClass
// ---------------------------------------------------------------------------

ShapeClass ShapeClass::monotone(std::optional<double> phi) {
  ShapeClass c{ShapeKind::Monotone, phi, 1.0, 1.0};
  c.validate();
  return c;
}

ShapeClass ShapeClass::convex(std::optional<double> phi) {
  ShapeClass c{ShapeKind::Convex, phi, 1.0, 1.0};
  c.validate();
  return c;
}

ShapeClass ShapeClass::holder(double gamma, double lip,
                              std::optional<double> phi) {
  ShapeClass c{ShapeKind::Holder, phi, gamma, lip};
  c.validate();
  return c;
}

void ShapeClass::validate() const {
  if (phi && !(*phi > 0.0)) throw ArgumentError("ShapeClass: phi must be > 0");
  if (kind == ShapeKind::Holder) {
    if (!(gamma > 0.0 && gamma <= 1.0))
      throw ArgumentError("ShapeClass: gamma must lie in (0,1]");
    if (!(lip > 0.0)) throw ArgumentError("ShapeClass: lip must be > 0");
  }
}

std::string ShapeClass::name() const {
  switch (kind) {
    case ShapeKind::Monotone: return "monotone";
    case ShapeKind::Convex: return "convex";
    case ShapeKind::Holder: return "holder";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// FittedFn
// ---------------------------------------------------------------------------

FittedFn FittedFn::step(std::vector<double> knots, std::vector<double> values) {
  FittedFn f{std::move(knots), std::move(values),
             Extension::PiecewiseConstantLeft};
  if (f.knots.empty() || f.knots.size() != f.values.size())
    throw ArgumentError("FittedFn: knots/values size mismatch");
  return f;
}

FittedFn FittedFn::linear(std::vector<double> knots, std::vector<double> values) {
  FittedFn f{std::move(knots), std::move(values),
             Extension::PiecewiseLinearLeftContinuous};
  if (f.knots.empty() || f.knots.size() != f.values.size())
    throw ArgumentError("FittedFn: knots/values size mismatch");
  return f;
}

double FittedFn::operator()(double t) const {
  const std::size_t k = knots.size();
  if (k == 1) return values[0];
  if (extension == Extension::PiecewiseConstantLeft) {
    // Left-continuous steps: value v_i on (x_{i-1}, x_i]; v_1 below x_1 and
    // v_k above x_k.
    if (t <= knots.front()) return values.front();
    if (t > knots.back()) return values.back();
    const auto it = std::lower_bound(knots.begin(), knots.end(), t);
    return values[static_cast<std::size_t>(it - knots.begin())];
  }
  // Piecewise linear with the first/last segment extended beyond the knots.
  std::size_t i;
  if (t <= knots.front()) {
    i = 0;
  } else if (t >= knots.back()) {
    i = k - 2;
  } else {
    const auto it = std::upper_bound(knots.begin(), knots.end(), t);
    i = static_cast<std::size_t>(it - knots.begin()) - 1;
  }
  const double h = knots[i + 1] - knots[i];
  const double w = (t - knots[i]) / h;
  return values[i] * (1.0 - w) + values[i + 1] * w;
}

std::vector<FittedFn::Segment> FittedFn::segments() const {
  std::vector<Segment> segs;
  const std::size_t k = knots.size();
  if (k == 1) {
    segs.push_back({0.0, 1.0, values[0], 0.0});
    return segs;
  }
  if (extension == Extension::PiecewiseConstantLeft) {
    double lo = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double hi = knots[i];
      if (hi > lo) segs.push_back({lo, hi, values[i], 0.0});
      lo = hi;
    }
    if (lo < 1.0) segs.push_back({lo, 1.0, values[k - 1], 0.0});
    return segs;
  }
  // Linear segments, clipped to [0,1] and extrapolated past the end knots.
  auto line = [&](std::size_t i) {
    const double b = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]);
    const double a = values[i] - b * knots[i];
    return std::pair<double, double>{a, b};
  };
  double lo = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    double hi = (i + 2 == k) ? 1.0 : knots[i + 1];
    hi = std::min(hi, 1.0);
    if (hi <= lo) continue;
    const auto [a, b] = line(i);
    segs.push_back({lo, hi, a, b});
    lo = hi;
  }
  if (segs.empty()) {
    const auto [a, b] = line(0);
    segs.push_back({0.0, 1.0, a, b});
  }
  return segs;
}

// ---------------------------------------------------------------------------
// RefFn
// ---------------------------------------------------------------------------

RefFn RefFn::zero() { return constant(0.0); }

RefFn RefFn::constant(double c) {
  RefFn f;
  f.eval = [c](double) { return c; };
  f.pieces = {{0.0, 1.0, c, 0.0, 0.0}};
  f.label = "const";
  return f;
}

RefFn RefFn::linear(double a0, double a1) {
  RefFn f;
  f.eval = [a0, a1](double t) { return a0 + a1 * t; };
  f.pieces = {{0.0, 1.0, a0, a1, 0.0}};
  f.label = "linear";
  return f;
}

RefFn RefFn::quadratic(double c0, double c1, double c2) {
  RefFn f;
  f.eval = [c0, c1, c2](double t) { return c0 + t * (c1 + t * c2); };
  f.pieces = {{0.0, 1.0, c0, c1, c2}};
  f.label = "quadratic";
  return f;
}

RefFn RefFn::from_fitted(const FittedFn& fit) {
  RefFn f;
  FittedFn copy = fit;
  f.eval = [copy](double t) { return copy(t); };
  for (const auto& s : fit.segments()) f.pieces.push_back({s.lo, s.hi, s.a, s.b, 0.0});
  f.label = "fitted";
  return f;
}

RefFn RefFn::callable(std::function<double(double)> fn, std::string label) {
  RefFn f;
  f.eval = std::move(fn);
  f.label = std::move(label);
  return f;
}

RefFn RefFn::named(const std::string& name) {
  if (name == "zero") return zero();
  if (name == "linear") return linear(0.0, 1.0);
  if (name == "square") {
    RefFn f = quadratic(0.0, 0.0, 1.0);
    f.label = "square";
    return f;
  }
  if (name == "sine") {
    RefFn f = callable([](double t) { return std::sin(kTwoPi * t); }, "sine");
    return f;
  }
  throw ArgumentError("RefFn: unknown function name '" + name + "'");
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

namespace {

double checked_eval(const RefFn& g, double t) {
  const double v = g.eval(t);
  if (!std::isfinite(v))
    throw EvaluationError("reference function is non-finite at t=" +
                          std::to_string(t));
  return v;
}

// Integral of (f-g)^2 * density over (lo, hi] with an `order`-point Gauss
// rule. Exact when the integrand is a polynomial of degree <= 2*order-1.
double gauss_segment(const FittedFn& f, const RefFn& g, const Design& measure,
                     double lo, double hi, int order) {
  const GaussRule& rule = cached_rule(order);
  const double c = 0.5 * (lo + hi), hwidth = 0.5 * (hi - lo);
  double acc = 0.0;
  for (int i = 0; i < order; ++i) {
    const double t = c + hwidth * rule.nodes[i];
    const double d = f(t) - checked_eval(g, t);
    acc += rule.weights[i] * d * d * measure.density(t);
  }
  return acc * hwidth;
}

}  // namespace

double population_l2_distance(const FittedFn& f, const RefFn& g,
                              const Design& measure, L2Method method) {
  if (method.kind == L2Method::Kind::Quadrature) {
    // Composite panels, refined at the integrand's piece boundaries so the
    // rule converges at full order.
    std::vector<double> cuts;
    cuts.reserve(method.panels + 16);
    for (int p = 0; p <= method.panels; ++p)
      cuts.push_back(static_cast<double>(p) / method.panels);
    for (const auto& s : f.segments()) cuts.push_back(s.hi);
    for (const auto& p : g.pieces) cuts.push_back(p.hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] <= 0.0 || cuts[i] >= 1.0) continue;
      const double lo = std::max(cuts[i], 0.0), hi = std::min(cuts[i + 1], 1.0);
      if (hi > lo) acc += gauss_segment(f, g, measure, lo, hi, method.order);
    }
    return std::sqrt(std::max(acc, 0.0));
  }

  // Exact piecewise path: integrate over the union of breakpoints. For
  // polynomial pieces of degree <= 2 the difference squared has degree <= 4,
  // so a 5-point rule per segment is exact under the uniform measure; smooth
  // non-polynomial references or densities fall back to a 12-point rule per
  // segment, which is the documented quadrature behavior.
  std::vector<double> cuts{0.0, 1.0};
  for (const auto& s : f.segments()) {
    cuts.push_back(s.lo);
    cuts.push_back(s.hi);
  }
  for (const auto& p : g.pieces) {
    cuts.push_back(p.lo);
    cuts.push_back(p.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const bool poly_exact =
      g.is_piecewise_poly() && measure.kind != DesignKind::CustomDensity;
  const int order = poly_exact ? 5 : 12;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= 0.0 || cuts[i] >= 1.0) continue;
    const double lo = std::max(cuts[i], 0.0), hi = std::min(cuts[i + 1], 1.0);
    if (hi > lo) acc += gauss_segment(f, g, measure, lo, hi, order);
  }
  return std::sqrt(std::max(acc, 0.0));
}

double empirical_l2_distance(const FittedFn& f, const RefFn& g,
                             const std::vector<double>& x) {
  if (x.empty()) throw ArgumentError("empirical_l2_distance: empty abscissae");
  double acc = 0.0;
  for (double t : x) {
    const double d = f(t) - checked_eval(g, t);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace heavyls
