#include "heavyls/noise.hpp"

#include <cmath>
#include <limits>

#include "heavyls/rng.hpp"

namespace heavyls {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kLog2 = 0.69314718055994530941723212145818;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::string noise_law_name(NoiseLaw law) {
  switch (law) {
    case NoiseLaw::Gaussian: return "gaussian";
    case NoiseLaw::StudentT: return "student_t";
    case NoiseLaw::SymPareto: return "sym_pareto";
    case NoiseLaw::TwoMomentLog: return "two_moment_log";
  }
  return "?";
}

NoiseLaw noise_law_from_name(const std::string& name) {
  if (name == "gaussian") return NoiseLaw::Gaussian;
  if (name == "student_t") return NoiseLaw::StudentT;
  if (name == "sym_pareto") return NoiseLaw::SymPareto;
  if (name == "two_moment_log") return NoiseLaw::TwoMomentLog;
  throw ConfigError("unknown noise law: " + name);
}

// ---------------------------------------------------------------------------
// SigmaFn
// ---------------------------------------------------------------------------

double SigmaFn::operator()(double x) const {
  switch (kind) {
    case Kind::Constant: return sigma_max;
    case Kind::Linear: return sigma_max * (0.2 + 0.8 * x);
    case Kind::Sine2: {
      const double s = std::sin(kTwoPi * x);
      return sigma_max * (0.2 + 0.8 * s * s);
    }
  }
  return sigma_max;
}

SigmaFn SigmaFn::constant(double sigma) {
  if (sigma < 0.0) throw ConfigError("sigma must be nonnegative");
  return {Kind::Constant, sigma};
}

SigmaFn SigmaFn::from_name(const std::string& name, double sigma_max) {
  if (sigma_max < 0.0) throw ConfigError("sigma_max must be nonnegative");
  if (name == "constant") return {Kind::Constant, sigma_max};
  if (name == "linear") return {Kind::Linear, sigma_max};
  if (name == "sine2") return {Kind::Sine2, sigma_max};
  throw ConfigError("unknown sigma function: " + name);
}

std::string SigmaFn::name() const {
  switch (kind) {
    case Kind::Constant: return "constant";
    case Kind::Linear: return "linear";
    case Kind::Sine2: return "sine2";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// NoiseSpec
// ---------------------------------------------------------------------------

bool NoiseSpec::violates_cvar() const {
  return law == NoiseLaw::StudentT && df <= 2.0;
}

void NoiseSpec::validate() const {
  switch (law) {
    case NoiseLaw::SymPareto:
      if (q_index <= 2.0)
        throw ConfigError(
            "sym_pareto requires q_index > 2 (variance undefined otherwise)");
      break;
    case NoiseLaw::StudentT:
      if (df <= 0.0) throw ConfigError("student_t requires df > 0");
      if (df <= 2.0 && sigma.kind != SigmaFn::Kind::Constant)
        throw ConfigError(
            "student_t with df <= 2 is only allowed with a constant sigma");
      break;
    default:
      break;
  }
}

std::string NoiseSpec::summary() const {
  std::string s = noise_law_name(law);
  if (law == NoiseLaw::StudentT) s += "(df=" + std::to_string(df) + ")";
  if (law == NoiseLaw::SymPareto) s += "(q=" + std::to_string(q_index) + ")";
  s += " sigma=" + sigma.name() + "(" + std::to_string(sigma.sigma_max) + ")";
  if (violates_cvar()) s += " [violates CVar]";
  return s;
}

// ---------------------------------------------------------------------------
// Laws
// ---------------------------------------------------------------------------

double two_moment_log_survival(double t) {
  if (t <= 1.0) return 1.0;
  const double lg = std::log1p(t);
  return (kLog2 * kLog2) / (t * t * lg * lg);
}

double two_moment_log_quantile(double u) {
  // Survival is 1 at t=1 and strictly decreasing; invert by bisection on
  // [1, 1e18] to 1e-12 relative on the survival bracket. For t >= e-1 the
  // survival is dominated by c/t^2, which gives a tight starting bracket.
  if (u >= 1.0) return 1.0;
  constexpr double c = kLog2 * kLog2;
  double lo = 1.0, hi = std::min(std::max(M_E, std::sqrt(c / u)), 1e18);
  if (two_moment_log_survival(hi) >= u) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = two_moment_log_survival(mid);
    if (s >= u)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-13 * lo) break;
    if (std::abs(s - u) <= 1e-12 * u && it > 40) break;
  }
  return 0.5 * (lo + hi);
}

double sym_pareto_cq(double q_index) {
  if (q_index <= 2.0)
    throw ConfigError("sym_pareto standardization needs q_index > 2");
  return std::sqrt(q_index / (q_index - 2.0));
}

namespace {

double draw_standardized(const NoiseSpec& spec, Rng& rng) {
  switch (spec.law) {
    case NoiseLaw::Gaussian:
      return rng.normal();
    case NoiseLaw::StudentT: {
      const double z = rng.normal();
      const double chi2 = 2.0 * rng.gamma(0.5 * spec.df);
      double t = z / std::sqrt(chi2 / spec.df);
      if (spec.df > 2.0) t /= std::sqrt(spec.df / (spec.df - 2.0));
      return t;
    }
    case NoiseLaw::SymPareto: {
      const double s = rng.sign();
      const double u = rng.uniform();
      const double p = std::pow(u, -1.0 / spec.q_index);  // Pareto(1, q)
      return s * p / sym_pareto_cq(spec.q_index);
    }
    case NoiseLaw::TwoMomentLog: {
      const double s = rng.sign();
      const double u = rng.uniform();
      return s * two_moment_log_quantile(u);
    }
  }
  return 0.0;
}

}  // namespace

std::vector<double> draw_errors(const NoiseSpec& spec,
                                const std::vector<double>& x) {
  return draw_errors(spec, x, spec.seed);
}

std::vector<double> draw_errors(const NoiseSpec& spec,
                                const std::vector<double>& x,
                                std::uint64_t stream_seed) {
  spec.validate();
  for (double t : x)
    if (!(t >= 0.0 && t <= 1.0))
      throw ArgumentError("draw_errors: abscissae must lie in [0,1]");
  Rng rng(stream_seed);
  std::vector<double> e(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    e[i] = spec.sigma(x[i]) * draw_standardized(spec, rng);
  return e;
}

double empirical_moment(const std::vector<double>& errors, double q) {
  if (errors.empty()) throw ArgumentError("empirical_moment: empty vector");
  if (q < 1.0) throw ArgumentError("empirical_moment: q must be >= 1");
  double acc = 0.0;
  for (double e : errors) acc += std::pow(std::abs(e), q);
  return acc / static_cast<double>(errors.size());
}

// ---------------------------------------------------------------------------
// Analytic survival / moments of the standardized laws
// ---------------------------------------------------------------------------

double law_survival(const NoiseSpec& spec, double t) {
  if (t <= 0.0) return 1.0;
  switch (spec.law) {
    case NoiseLaw::Gaussian:
      return std::erfc(t / std::sqrt(2.0));
    case NoiseLaw::SymPareto: {
      const double c = sym_pareto_cq(spec.q_index);
      if (c * t <= 1.0) return 1.0;
      return std::pow(c * t, -spec.q_index);
    }
    case NoiseLaw::TwoMomentLog:
      return two_moment_log_survival(t);
    case NoiseLaw::StudentT:
      throw CapabilityError("law_survival: no closed form for student_t");
  }
  return 0.0;
}

double law_abs_moment(const NoiseSpec& spec, double m) {
  if (m < 0.0) throw ArgumentError("law_abs_moment: m must be >= 0");
  switch (spec.law) {
    case NoiseLaw::Gaussian:
      // E|Z|^m = 2^{m/2} Gamma((m+1)/2) / sqrt(pi)
      return std::pow(2.0, 0.5 * m) * std::tgamma(0.5 * (m + 1.0)) /
             std::sqrt(M_PI);
    case NoiseLaw::SymPareto: {
      if (m >= spec.q_index) return kInf;
      const double c = sym_pareto_cq(spec.q_index);
      return spec.q_index / (spec.q_index - m) * std::pow(c, -m);
    }
    case NoiseLaw::StudentT: {
      if (m >= spec.df) return kInf;
      double mom = std::pow(spec.df, 0.5 * m) * std::tgamma(0.5 * (m + 1.0)) *
                   std::tgamma(0.5 * (spec.df - m)) /
                   (std::sqrt(M_PI) * std::tgamma(0.5 * spec.df));
      if (spec.df > 2.0) mom *= std::pow(spec.df / (spec.df - 2.0), -0.5 * m);
      return mom;
    }
    case NoiseLaw::TwoMomentLog: {
      if (m > 2.0) return kInf;
      // E|Z|^m = 1 + m log^2(2) * I with I = int_1^inf t^{m-3}/log^2(1+t) dt,
      // integrated in v = log(1+t) with an explicit 1/log(T) tail for m = 2.
      double acc = 0.0;
      const int panels = 20000;
      const double vmax = std::log(1e12);
      const double h = vmax / panels;
      for (int i = 0; i < panels; ++i) {
        auto f = [m](double v) {
          const double t = std::expm1(v);
          if (t < 1.0) return 0.0;
          return std::pow(t, m - 3.0) * (t + 1.0) / (v * v);
        };
        const double a = i * h;
        acc += (h / 6.0) * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
      }
      if (m == 2.0) acc += 1.0 / vmax;  // int_T^inf dt/(t log^2 t) = 1/log T
      return 1.0 + m * kLog2 * kLog2 * acc;
    }
  }
  return 0.0;
}

}  // namespace heavyls
