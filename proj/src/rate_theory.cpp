#include "heavyls/rate_theory.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace heavyls {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string regime_name(EntropyRegime r) {
  switch (r) {
    case EntropyRegime::BracketingL2: return "bracketing_l2";
    case EntropyRegime::SupNorm: return "sup_norm";
    case EntropyRegime::VcType: return "vc_type";
  }
  return "?";
}

EntropyRegime regime_from_name(const std::string& name) {
  if (name == "bracketing_l2" || name == "bracketing") return EntropyRegime::BracketingL2;
  if (name == "sup_norm" || name == "supnorm") return EntropyRegime::SupNorm;
  if (name == "vc_type" || name == "vc") return EntropyRegime::VcType;
  throw ArgumentError("unknown entropy regime: " + name);
}

void RegimeInput::validate() const {
  if (!(s >= 0.0 && s <= 1.0))
    throw ArgumentError("RegimeInput: s must lie in [0,1]");
  if (entropy == EntropyRegime::VcType) {
    if (alpha < 0.0) throw ArgumentError("RegimeInput: alpha must be >= 0");
    if (beta < 0.0) throw ArgumentError("RegimeInput: beta must be >= 0");
    if (alpha >= 2.0 && beta > 0.0)
      throw ArgumentError(
          "RegimeInput: no rate formula for alpha >= 2 with beta > 0");
  } else {
    if (!(alpha >= 0.0 && alpha < 2.0))
      throw ArgumentError("RegimeInput: alpha must lie in [0,2)");
    if (q < 2.0) throw ArgumentError("RegimeInput: q must be >= 2");
  }
}

RatePrediction predict_bracketing(double alpha, double s, double q) {
  RegimeInput in{EntropyRegime::BracketingL2, alpha, 0.0, s, q};
  in.validate();
  RatePrediction out;
  const double minimax = 1.0 / (2.0 + alpha);
  const double heavy = (q - 1.0) / (q * (2.0 - s) + alpha * (q - 1.0));
  out.exponent = std::min(minimax, heavy);
  out.regime_notes = heavy < minimax ? "moment-limited branch binds"
                                     : "entropy branch binds";
  out.moment_threshold = s > 0.0 ? 2.0 / s : kInf;
  out.tail_exponent = q - (s == 1.0 ? 0.1 : 0.0);
  out.log_factor = false;
  return out;
}

RatePrediction predict_supnorm(double alpha, double s, double q) {
  RegimeInput in{EntropyRegime::SupNorm, alpha, 0.0, s, q};
  in.validate();
  RatePrediction out;
  const double minimax = 1.0 / (2.0 + alpha);
  const double heavy = (q - 1.0) / (q * (2.0 - s) + alpha * s * (q - 1.0));
  out.exponent = std::min(minimax, heavy);
  out.regime_notes = heavy < minimax ? "moment-limited branch binds"
                                     : "entropy branch binds";
  const double denom = s + alpha * (1.0 - s);
  out.moment_threshold = denom > 0.0
                             ? (2.0 + alpha * (1.0 - s)) / denom
                             : kInf;
  out.tail_exponent = q - (s == 1.0 ? 0.1 : 0.0);
  out.log_factor = false;
  return out;
}

RatePrediction predict_vc(double alpha, double beta, double s) {
  RegimeInput in{EntropyRegime::VcType, alpha, beta, s, 2.0};
  in.validate();
  RatePrediction out;
  if (alpha < 2.0) {
    out.exponent = 1.0 / (2.0 * (2.0 - s));
    out.regime_notes = "alpha < 2";
  } else if (alpha == 2.0) {
    out.exponent = 1.0 / (2.0 - s);
    out.log_factor = true;  // rate carries a 1/log n factor
    out.regime_notes = "alpha = 2 (1/log n factor)";
  } else {
    out.exponent = 1.0 / (alpha * (2.0 - s));
    out.regime_notes = "alpha > 2";
  }
  out.moment_threshold = 2.0;
  out.tail_exponent = 4.0 * (2.0 - s) / 3.0;
  return out;
}

RatePrediction predict(const RegimeInput& in) {
  switch (in.entropy) {
    case EntropyRegime::BracketingL2:
      return predict_bracketing(in.alpha, in.s, in.q);
    case EntropyRegime::SupNorm:
      return predict_supnorm(in.alpha, in.s, in.q);
    case EntropyRegime::VcType:
      return predict_vc(in.alpha, in.beta, in.s);
  }
  throw ArgumentError("predict: unknown regime");
}

double rn_with_constants(EntropyRegime regime, double n, double alpha,
                         double beta, double s, double q, double A, double phi,
                         double sigma) {
  if (n < 1.0) throw ArgumentError("rn_with_constants: n must be >= 1");
  if (A <= 0.0 || phi <= 0.0 || sigma < 0.0)
    throw ArgumentError("rn_with_constants: bad constants");
  switch (regime) {
    case EntropyRegime::BracketingL2: {
      const double t1 = std::pow(n / A, 1.0 / (2.0 + alpha)) /
                        std::pow(sigma + phi, 2.0 / (2.0 + alpha));
      const double t2 = std::pow(n, (q - 1.0) / (q * (2.0 - s))) /
                        std::pow(phi, 2.0 / (2.0 - s));
      const double e3 = 2.0 + alpha + (2.0 - q * s) / (q - 1.0);
      const double c3 = 2.0 - q * s + (2.0 + alpha) * (q - 1.0);
      const double t3 = std::pow(n, 1.0 / e3) /
                        std::pow(std::pow(A, q - 1.0) * std::pow(phi, 2.0 * q),
                                 1.0 / c3);
      return std::min({t1, t2, t3});
    }
    case EntropyRegime::SupNorm: {
      const double t1 = std::pow(n / A, 1.0 / (2.0 + alpha)) /
                        std::pow(sigma + phi, 2.0 / (2.0 + alpha));
      const double t2 = std::pow(n, (q - 1.0) / (q * (2.0 - s))) /
                        std::pow(phi, 2.0 / (2.0 - s));
      const double d3 = q * (2.0 - s) + alpha * s * (q - 1.0);
      const double t3 =
          std::pow(n / A, (q - 1.0) / d3) /
          std::pow(phi, (q * (2.0 - s) + alpha * (s - 1.0) * (q - 1.0)) / d3);
      return std::min({t1, t2, t3});
    }
    case EntropyRegime::VcType: {
      // epsilon_n maxima from the three entropy cases; r_n is the inverse.
      const double e2 = phi / std::sqrt(n);
      const double e3 = std::pow(std::pow(phi, 4.5) / n, 1.0 / (2.0 * (2.0 - s)));
      double e1;
      if (alpha < 2.0) {
        e1 = std::pow(A * phi * phi / n, 1.0 / (2.0 * (2.0 - s)));
      } else if (alpha == 2.0) {
        const double lg = std::log(std::max(n / A, 2.0));
        e1 = std::pow(A * phi * phi * lg * lg / n, 1.0 / (2.0 * (2.0 - s)));
      } else {
        e1 = std::pow(std::pow(A, 2.0 / alpha) * phi * phi /
                          std::pow(n, 2.0 / alpha),
                      1.0 / (2.0 * (2.0 - s)));
      }
      (void)beta;
      return 1.0 / std::max({e1, e2, e3});
    }
  }
  throw ArgumentError("rn_with_constants: unknown regime");
}

std::pair<double, double> table_lookup(const std::string& class_name,
                                       double gamma, int d) {
  if (class_name == "holder") {
    if (!(gamma > 0.0) || d < 1) throw ArgumentError("table_lookup: bad holder parameters");
    return {d / gamma, 2.0 * gamma / (2.0 * gamma + d)};
  }
  if (class_name == "sobolev") {
    if (!(gamma > 0.5) || d < 1)
      throw ArgumentError("table_lookup: sobolev needs gamma > 1/2");
    return {d / gamma, (2.0 * gamma - 1.0) / (2.0 * gamma + d - 1.0)};
  }
  if (class_name == "lipschitz_1d") return {1.0, 2.0 / 3.0};
  if (class_name == "holder_union_indicators") {
    if (!(gamma > 0.0)) throw ArgumentError("table_lookup: bad gamma");
    return {1.0 / gamma, 0.0};
  }
  throw ArgumentError("table_lookup: unknown class '" + class_name + "'");
}

// ---------------------------------------------------------------------------
// Exact-rational tables
// ---------------------------------------------------------------------------

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (d == 0) throw ArgumentError("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(std::abs(num), den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

std::string Rational::str() const {
  if (den == 0) return "inf";
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational rat_add(Rational a, Rational b) {
  if (a.is_infinite() || b.is_infinite()) return Rational::infinity();
  return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
}

Rational rat_mul(Rational a, Rational b) {
  if (a.is_infinite() || b.is_infinite()) return Rational::infinity();
  return Rational(a.num * b.num, a.den * b.den);
}

Rational rat_div(Rational a, Rational b) {
  if (a.is_infinite()) return Rational::infinity();
  if (b.num == 0) return Rational::infinity();
  return Rational(a.num * b.den, a.den * b.num);
}

namespace {
const Rational kOne{1, 1}, kTwo{2, 1}, kThree{3, 1};
}

std::vector<TableRow> table1(const std::vector<std::pair<Rational, int>>& gd) {
  std::vector<TableRow> rows;
  for (const auto& [g, d] : gd) {
    const Rational dd{d, 1};
    TableRow holder;
    holder.space = "[0,1]^" + std::to_string(d);
    holder.family = "holder(gamma=" + g.str() + ")";
    holder.alpha = rat_div(dd, g);
    holder.s = rat_div(rat_mul(kTwo, g), rat_add(rat_mul(kTwo, g), dd));
    rows.push_back(holder);

    if (rat_mul(kTwo, g).num > rat_mul(kTwo, g).den) {  // gamma > 1/2
      TableRow sob;
      sob.space = holder.space;
      sob.family = "sobolev(gamma=" + g.str() + ")";
      sob.alpha = rat_div(dd, g);
      const Rational n2g1 = rat_add(rat_mul(kTwo, g), Rational{-1, 1});
      sob.s = rat_div(n2g1, rat_add(rat_mul(kTwo, g), Rational{d - 1, 1}));
      rows.push_back(sob);
    }
  }
  TableRow lip;
  lip.space = "[0,1]";
  lip.family = "lipschitz";
  lip.alpha = kOne;
  lip.s = Rational{2, 3};
  rows.push_back(lip);
  return rows;
}

std::vector<Table2Row> table2() {
  return {
      {"bracketing_l2", "||(|e|+Phi) F_delta(X)||_q <= C Phi^2 delta^s",
       "q >= 2/s", "n^{-1/(2+alpha)}"},
      {"sup_norm", "||F_delta||_inf <= C Phi^{1-s} delta^s",
       "q >= (2+alpha(1-s))/(s+alpha(1-s))", "n^{-1/(2+alpha)}"},
      {"vc_type", "||F_delta|| <= C Phi^{1-s} delta^s", "q >= 2",
       "n^{-1/(2(2-s))}"},
  };
}

std::vector<TableRow> table3(const std::vector<std::pair<Rational, int>>& gd) {
  std::vector<TableRow> rows;
  for (const auto& [g, d] : gd) {
    const Rational dd{d, 1};
    TableRow holder;
    holder.space = "[0,1]^" + std::to_string(d);
    holder.family = "holder(gamma=" + g.str() + ")";
    holder.alpha = rat_div(dd, g);
    holder.s = rat_div(rat_mul(kTwo, g), rat_add(rat_mul(kTwo, g), dd));
    holder.moments_indep = rat_add(kOne, rat_div(rat_mul(kTwo, g), dd));
    holder.moments_ours = rat_add(kTwo, rat_div(dd, g));
    rows.push_back(holder);

    if (rat_mul(kTwo, g).num > rat_mul(kTwo, g).den) {
      TableRow sob;
      sob.space = holder.space;
      sob.family = "sobolev(gamma=" + g.str() + ")";
      sob.alpha = rat_div(dd, g);
      const Rational n2g1 = rat_add(rat_mul(kTwo, g), Rational{-1, 1});
      sob.s = rat_div(n2g1, rat_add(rat_mul(kTwo, g), Rational{d - 1, 1}));
      sob.moments_indep = rat_add(kOne, rat_div(rat_mul(kTwo, g), dd));
      sob.moments_ours = rat_add(kTwo, rat_div(rat_mul(kTwo, dd), n2g1));
      rows.push_back(sob);
    }
  }
  TableRow lip;
  lip.space = "[0,1]";
  lip.family = "lipschitz";
  lip.alpha = kOne;
  lip.s = Rational{2, 3};
  lip.moments_indep = kThree;
  lip.moments_ours = kThree;
  rows.push_back(lip);

  for (const auto& [g, d] : gd) {
    if (d != 1) continue;
    TableRow uni;
    uni.space = "[0,1]";
    uni.family = "holder_union_indicators(gamma=" + g.str() + ")";
    uni.alpha = rat_div(kOne, g);
    uni.s = Rational{0, 1};
    uni.moments_indep = rat_add(kOne, rat_mul(kTwo, g));
    uni.moments_ours = Rational::infinity();
    rows.push_back(uni);
  }
  return rows;
}

}  // namespace heavyls
