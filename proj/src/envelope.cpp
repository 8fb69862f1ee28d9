#include "heavyls/envelope.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "heavyls/rng.hpp"
#include "heavyls/solvers.hpp"

namespace heavyls {

// ---------------------------------------------------------------------------
// Center
// ---------------------------------------------------------------------------

Center Center::zero() { return constant(0.0); }

Center Center::constant(double c) {
  Center out;
  out.name = c == 0.0 ? "zero" : "const";
  out.fn = RefFn::constant(c);
  out.is_constant = true;
  out.value = c;
  out.is_linear = true;
  return out;
}

Center Center::linear(double a0, double a1) {
  if (a1 == 0.0) return constant(a0);
  Center out;
  out.name = "linear";
  out.fn = RefFn::linear(a0, a1);
  out.is_linear = true;
  return out;
}

Center Center::named(const std::string& name) {
  if (name == "zero") return zero();
  if (name == "linear") return linear(0.0, 1.0);
  Center out;
  out.name = name;
  out.fn = RefFn::named(name);
  return out;
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

double envelope_analytic(const ShapeClass& cls, const Center& center,
                         double delta, double x, const Design& measure) {
  cls.validate();
  if (delta < 0.0) throw ArgumentError("envelope: delta must be >= 0");
  if (delta == 0.0) return 0.0;
  switch (cls.kind) {
    case ShapeKind::Monotone: {
      if (!center.is_constant)
        throw CapabilityError(
            "monotone envelope closed form needs a constant center; use "
            "envelope_oracle");
      const double mass = std::max(measure.cdf(x), 1.0 - measure.cdf(x));
      return std::min(1.0, delta / std::sqrt(std::max(mass, 1e-300)));
    }
    case ShapeKind::Convex: {
      if (!cls.phi)
        throw CapabilityError(
            "convex envelope closed form needs the sup bound phi; use "
            "envelope_oracle");
      const double phi = *cls.phi;
      const double endpoint =
          std::max(std::pow(std::max(x, 1e-300), -1.0 / 3.0),
                   std::pow(std::max(1.0 - x, 1e-300), -1.0 / 3.0));
      const double body =
          2.0 * std::cbrt(2.0 * phi) * std::pow(delta, 2.0 / 3.0) * endpoint;
      return std::min(body, 2.0 * phi);
    }
    case ShapeKind::Holder: {
      if (cls.gamma != 1.0)
        throw CapabilityError(
            "holder envelope closed form covers gamma = 1 only; use "
            "envelope_oracle");
      // Uniform sup-norm bound, independent of x.
      return 2.0 * std::cbrt(cls.lip) * std::pow(delta, 2.0 / 3.0);
    }
  }
  throw CapabilityError("envelope_analytic: unsupported class");
}

// ---------------------------------------------------------------------------
// Grid oracle
// ---------------------------------------------------------------------------

namespace {

struct OracleGrid {
  std::vector<double> t, w, f0;
  ShapeClass cls;
  bool pure_cone;

  OracleGrid(const ShapeClass& cls_, const Center& center, int m,
             const Design& measure)
      : cls(cls_) {
    t.resize(m);
    w.resize(m);
    f0.resize(m);
    for (int j = 0; j < m; ++j) {
      t[j] = (j + 0.5) / m;
      w[j] = measure.density(t[j]) / m;
      f0[j] = center.fn(t[j]);
    }
    switch (cls.kind) {
      case ShapeKind::Monotone: pure_cone = center.is_constant; break;
      case ShapeKind::Convex: pure_cone = center.is_linear; break;
      default: pure_cone = false; break;
    }
  }

  int size() const { return static_cast<int>(t.size()); }

  // Projection onto the discretized class, in f coordinates.
  std::vector<double> project_class(const std::vector<double>& u) const {
    switch (cls.kind) {
      case ShapeKind::Monotone:
        return pava(u, w);
      case ShapeKind::Convex:
        return project_convex_cone(u, w, t).theta;
      case ShapeKind::Holder: {
        const int m = size();
        if (cls.gamma == 1.0) {
          std::vector<double> lo(m - 1), hi(m - 1);
          for (int k = 0; k + 1 < m; ++k) {
            hi[k] = cls.lip * (t[k + 1] - t[k]);
            lo[k] = -hi[k];
          }
          return project_chain(u, w, lo, hi).theta;
        }
        auto bfun = [&](int i, int j) {
          return cls.lip * std::pow(t[j] - t[i], cls.gamma);
        };
        return project_pairwise(u, w, bfun).theta;
      }
    }
    return u;
  }

  // Projection of a g-space point onto {g : g + f0 in class, |g + f0| <= phi}.
  std::vector<double> project_shifted(const std::vector<double>& g) const {
    const int m = size();
    std::vector<double> uf(m);
    for (int j = 0; j < m; ++j) uf[j] = g[j] + f0[j];
    std::vector<double> pf;
    if (cls.phi) {
      auto proj = [&](const std::vector<double>& u) { return project_class(u); };
      pf = dykstra_box(proj, *cls.phi, uf, 1e-8, 5000).point;
      for (double& v : pf) v = std::clamp(v, -*cls.phi, *cls.phi);
    } else {
      pf = project_class(uf);
    }
    for (int j = 0; j < m; ++j) pf[j] -= f0[j];
    return pf;
  }

  // Cone projection directly in g coordinates (pure-cone cases only).
  std::vector<double> project_cone_g(const std::vector<double>& g) const {
    if (cls.kind == ShapeKind::Monotone) return pava(g, w);
    return project_convex_cone(g, w, t).theta;
  }

  double wnorm(const std::vector<double>& g) const {
    double acc = 0.0;
    for (int j = 0; j < size(); ++j) acc += w[j] * g[j] * g[j];
    return std::sqrt(acc);
  }
};

// One direction of the oracle via bisection on the penalty multiplier mu:
// g(mu) = Pi_S(c / (mu w)) has w-norm decreasing in mu, and the constrained
// max sits where the norm crosses delta (ball slack if it never does).
double oracle_direction(const OracleGrid& grid, double delta, int idx,
                        double sign) {
  const int m = grid.size();
  auto eval = [&](double mu, double& norm_out) {
    std::vector<double> u(m, 0.0);
    u[idx] = sign / (grid.w[idx] * mu);
    std::vector<double> g = grid.project_shifted(u);
    norm_out = grid.wnorm(g);
    return sign * g[idx];
  };

  int steps = 0;
  const int max_steps = 200;
  double mu_lo = 1.0, mu_hi = 1.0;
  double nlo, nhi, vhi;
  double vlo = eval(mu_lo, nlo);
  ++steps;
  if (nlo < delta) {
    // Push harder; if the norm saturates below delta the ball is slack and
    // the class bound caps the envelope.
    while (nlo < delta && mu_lo > 1e-10 && steps < max_steps) {
      mu_hi = mu_lo;
      vhi = vlo;
      nhi = nlo;
      mu_lo /= 4.0;
      vlo = eval(mu_lo, nlo);
      ++steps;
    }
    if (nlo < delta) return vlo;
  } else {
    nhi = nlo;
    vhi = vlo;
    while (nhi >= delta && steps < max_steps) {
      mu_lo = mu_hi;
      vlo = vhi;
      nlo = nhi;
      mu_hi *= 4.0;
      vhi = eval(mu_hi, nhi);
      ++steps;
    }
    if (nhi >= delta)
      throw SolveError("envelope_oracle: bisection bracket failed");
  }
  while (steps < max_steps) {
    const double mu = std::sqrt(mu_lo * mu_hi);
    double nm;
    const double vm = eval(mu, nm);
    ++steps;
    if (nm >= delta) {
      mu_lo = mu;
      vlo = vm;
    } else {
      mu_hi = mu;
      vhi = vm;
    }
    if (std::abs(vlo - vhi) <= 1e-6 * std::max(1.0, std::abs(vlo))) break;
  }
  if (std::abs(vlo - vhi) > 1e-6 * std::max(1.0, std::abs(vlo)))
    throw SolveError("envelope_oracle: bisection did not converge in 200 steps");
  return 0.5 * (vlo + vhi);
}

double oracle_at_index(const OracleGrid& grid, double delta, int idx) {
  if (delta == 0.0) return 0.0;
  double best = 0.0;
  for (double sign : {1.0, -1.0}) {
    if (grid.pure_cone) {
      // Moreau: sup_{g in K, ||g||_w <= delta} <e_idx, g> equals
      // delta ||Pi_K(W^{-1} e_idx)||_w while the sup bound stays slack at
      // the maximizer g* = delta Pi / ||Pi||.
      const int m = grid.size();
      std::vector<double> u(m, 0.0);
      u[idx] = sign / grid.w[idx];
      std::vector<double> pi = grid.project_cone_g(u);
      const double nrm = grid.wnorm(pi);
      if (nrm > 1e-300) {
        const double val = delta * nrm;
        bool inside = true;
        if (grid.cls.phi) {
          for (int j = 0; j < m; ++j) {
            const double fj = delta * pi[j] / nrm + grid.f0[j];
            if (std::abs(fj) > *grid.cls.phi + 1e-12) {
              inside = false;
              break;
            }
          }
        }
        if (inside) {
          best = std::max(best, val);
          continue;
        }
      }
    }
    best = std::max(best, oracle_direction(grid, delta, idx, sign));
  }
  return best;
}

}  // namespace

double envelope_oracle(const ShapeClass& cls, const Center& center,
                       double delta, double x, int grid_m,
                       const Design& measure) {
  cls.validate();
  if (grid_m < 32) throw ArgumentError("envelope_oracle: grid_m must be >= 32");
  if (delta < 0.0) throw ArgumentError("envelope_oracle: delta must be >= 0");
  if (!(x >= 0.0 && x <= 1.0))
    throw ArgumentError("envelope_oracle: x must lie in [0,1]");
  OracleGrid grid(cls, center, grid_m, measure);
  int idx = static_cast<int>(std::floor(x * grid_m));
  idx = std::clamp(idx, 0, grid_m - 1);
  return oracle_at_index(grid, delta, idx);
}

std::vector<double> default_delta_grid() {
  std::vector<double> d(12);
  const double lo = std::log(0.01), hi = std::log(0.5);
  for (int i = 0; i < 12; ++i) d[i] = std::exp(lo + (hi - lo) * i / 11.0);
  return d;
}

EnvelopeProfile envelope_profile(const ShapeClass& cls, const Center& center,
                                 const std::vector<double>& deltas, int grid_m,
                                 int x_stride, const Design& measure) {
  if (x_stride < 1) throw ArgumentError("envelope_profile: bad stride");
  EnvelopeProfile prof;
  prof.cls = cls;
  prof.center = center.name;
  prof.deltas = deltas;
  OracleGrid grid(cls, center, grid_m, measure);
  std::vector<int> idxs;
  for (int j = 0; j < grid_m; j += x_stride) idxs.push_back(j);
  for (double delta : deltas) {
    double wsum = 0.0, s2 = 0.0, s3 = 0.0, smax = 0.0;
    for (int j : idxs) {
      const double v = oracle_at_index(grid, delta, j);
      const double w = grid.w[j];
      wsum += w;
      s2 += w * v * v;
      s3 += w * v * v * v;
      smax = std::max(smax, v);
    }
    prof.norm_sup.push_back(smax);
    prof.norm_l2.push_back(std::sqrt(s2 / wsum));
    prof.norm_l3.push_back(std::cbrt(s3 / wsum));
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Growth exponent fit
// ---------------------------------------------------------------------------

GrowthFit fit_growth_exponent(const std::vector<double>& deltas,
                              const std::vector<double>& norms) {
  if (deltas.size() != norms.size() || deltas.size() < 6)
    throw ArgumentError("fit_growth_exponent: need >= 6 delta points");
  const auto [mn, mx] = std::minmax_element(deltas.begin(), deltas.end());
  if (*mx / *mn < 10.0)
    throw ArgumentError("fit_growth_exponent: deltas must span a decade");
  const double first = norms.front();
  bool degenerate = true;
  for (double v : norms) {
    if (!(v > 0.0))
      throw ArgumentError("fit_growth_exponent: norms must be positive");
    if (std::abs(v - first) > 1e-14 * std::abs(first)) degenerate = false;
  }
  if (degenerate) throw ArgumentError("fit_growth_exponent: degenerate norms");

  const int n = static_cast<int>(deltas.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::log(deltas[i]);
    X(i, 2) = std::log(std::log(1.0 / std::min(deltas[i], 0.999)));
    y[i] = std::log(norms[i]);
  }
  Eigen::VectorXd beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  const Eigen::VectorXd resid = y - X * beta;
  const double ss_res = resid.squaredNorm();
  const double mean = y.mean();
  double ss_tot = 0.0;
  for (int i = 0; i < n; ++i) ss_tot += (y[i] - mean) * (y[i] - mean);
  GrowthFit fit;
  fit.s_hat = beta[1];
  fit.nu_hat = beta[2];
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

GrowthFit fit_growth_exponent(EnvelopeProfile& profile,
                              const std::string& norm) {
  const std::vector<double>* v = nullptr;
  if (norm == "sup")
    v = &profile.norm_sup;
  else if (norm == "l2")
    v = &profile.norm_l2;
  else if (norm == "l3")
    v = &profile.norm_l3;
  else
    throw ArgumentError("fit_growth_exponent: norm must be sup|l2|l3");
  GrowthFit fit = fit_growth_exponent(profile.deltas, *v);
  profile.norm_used = norm;
  profile.s_hat = fit.s_hat;
  profile.nu_hat = fit.nu_hat;
  profile.r2 = fit.r2;
  return fit;
}

// ---------------------------------------------------------------------------
// Interpolation inequality checks
// ---------------------------------------------------------------------------

namespace {

// Piecewise-linear member of the L-Lipschitz ball on 64 random knots:
// slopes uniform in [-L, L], then recentered and shifted so ||f||_inf <= L.
struct PwLinear {
  std::vector<double> knots, values;

  static PwLinear sample(double lip, Rng& rng) {
    constexpr int kKnots = 64;
    PwLinear f;
    f.knots.resize(kKnots);
    f.knots.front() = 0.0;
    for (int i = 1; i + 1 < kKnots; ++i) f.knots[i] = rng.uniform();
    f.knots.back() = 1.0;
    std::sort(f.knots.begin(), f.knots.end());
    f.values.resize(kKnots);
    f.values[0] = 0.0;
    for (int i = 1; i < kKnots; ++i) {
      const double slope = (2.0 * rng.uniform() - 1.0) * lip;
      f.values[i] = f.values[i - 1] + slope * (f.knots[i] - f.knots[i - 1]);
    }
    const auto [mn, mx] = std::minmax_element(f.values.begin(), f.values.end());
    const double mid = 0.5 * (*mn + *mx), range = 0.5 * (*mx - *mn);
    const double room = std::max(lip - range, 0.0);
    const double shift = (2.0 * rng.uniform() - 1.0) * room;
    for (double& v : f.values) v = v - mid + shift;
    return f;
  }

  double sup() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  double max() const { return *std::max_element(values.begin(), values.end()); }
  double min() const { return *std::min_element(values.begin(), values.end()); }

  void moments(double& mean, double& mean_sq) const {
    mean = 0.0;
    mean_sq = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const double h = knots[i + 1] - knots[i];
      const double a = values[i], b = values[i + 1];
      mean += h * 0.5 * (a + b);
      mean_sq += h * (a * a + a * b + b * b) / 3.0;
    }
  }
};

void record(InterpolationReport& rep, double sup, double bound) {
  const double ratio = sup == 0.0 ? 0.0 : sup / bound;
  if (ratio > rep.max_ratio) {
    rep.max_ratio = ratio;
    rep.worst_sup = sup;
    rep.worst_bound = bound;
  }
  if (sup > bound * (1.0 + 1e-12)) ++rep.violations;
}

}  // namespace

InterpolationReport check_interpolation_lipschitz(double lip, int samples,
                                                  std::uint64_t seed) {
  InterpolationReport rep;
  rep.family = "lipschitz";
  rep.samples = samples;
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const PwLinear f = PwLinear::sample(lip, rng);
    double mean, mean_sq;
    f.moments(mean, mean_sq);
    const double l2 = std::sqrt(std::max(mean_sq, 0.0));
    const double bound = 2.0 * std::pow(l2, 2.0 / 3.0) * std::cbrt(lip);
    record(rep, f.sup(), bound);
  }
  return rep;
}

InterpolationReport check_interpolation_additive(int d, double lip,
                                                 int samples,
                                                 std::uint64_t seed) {
  if (d < 1) throw ArgumentError("check_interpolation_additive: d >= 1");
  InterpolationReport rep;
  rep.family = "additive(d=" + std::to_string(d) + ")";
  rep.samples = samples;
  Rng rng(seed);
  const double c = 2.0 / 3.0;  // 2*gamma/(2*gamma+1) at gamma = 1
  for (int s = 0; s < samples; ++s) {
    double sup_max = 0.0, sup_min = 0.0, var_sum = 0.0, mean_sum = 0.0;
    for (int j = 0; j < d; ++j) {
      const PwLinear f = PwLinear::sample(lip, rng);
      double mean, mean_sq;
      f.moments(mean, mean_sq);
      sup_max += f.max();
      sup_min += f.min();
      var_sum += mean_sq - mean * mean;
      mean_sum += mean;
    }
    // Coordinates are independent, so the sup of the sum is the sum of the
    // sups, and ||f||_2^2 = sum of variances + (sum of means)^2.
    const double sup = std::max(sup_max, -sup_min);
    const double l2 = std::sqrt(std::max(var_sum + mean_sum * mean_sum, 0.0));
    const double bound = 5.0 * d * std::pow(l2, c) * std::pow(lip, 1.0 - c);
    record(rep, sup, bound);
  }
  return rep;
}

InterpolationReport check_interpolation_multiple_index(double lip, int samples,
                                                       std::uint64_t seed) {
  InterpolationReport rep;
  rep.family = "multiple_index(p=1)";
  rep.samples = samples;
  Rng rng(seed);
  const double c = 2.0 / 3.0;  // 2*gamma/(2*gamma+p) at gamma = 1, p = 1
  for (int s = 0; s < samples; ++s) {
    // f(x) = m(x1) - m0(x2) with orthonormal single-index rows; the index
    // pair is uniform on the unit square, so the density bound is 1.
    const PwLinear m = PwLinear::sample(lip, rng);
    const PwLinear m0 = PwLinear::sample(lip, rng);
    const double sup = std::max(m.max() - m0.min(), m0.max() - m.min());
    double mean1, sq1, mean0, sq0;
    m.moments(mean1, sq1);
    m0.moments(mean0, sq0);
    const double var = (sq1 - mean1 * mean1) + (sq0 - mean0 * mean0);
    const double l2 =
        std::sqrt(std::max(var + (mean1 - mean0) * (mean1 - mean0), 0.0));
    const double bound = 10.0 * std::pow(l2, c) * std::pow(lip, 1.0 - c);
    record(rep, sup, bound);
  }
  return rep;
}

}  // namespace heavyls
