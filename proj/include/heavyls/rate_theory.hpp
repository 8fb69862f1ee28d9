#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heavyls/core_types.hpp"

namespace heavyls {

enum class EntropyRegime { BracketingL2, SupNorm, VcType };

std::string regime_name(EntropyRegime r);
EntropyRegime regime_from_name(const std::string& name);

struct RegimeInput {
  EntropyRegime entropy = EntropyRegime::BracketingL2;
  double alpha = 1.0;  // complexity
  double beta = 0.0;   // log power, vc only
  double s = 0.0;      // envelope growth, in [0,1]
  double q = 2.0;      // error moments, >= 2
  void validate() const;
};

struct RatePrediction {
  double exponent = 0.0;          // ||f_hat - f0|| ~ n^{-exponent} up to logs
  double moment_threshold = 0.0;  // q*: exponent is minimax once q >= q*
  double tail_exponent = 0.0;     // polynomial decay power of the tail bound
  bool log_factor = false;        // a log-power correction applies
  std::string regime_notes;       // which branch of r_n binds
};

/// Bracketing-entropy regime: exponent
/// min{ 1/(2+alpha), (q-1)/(q(2-s)+alpha(q-1)) }, threshold 2/s.
RatePrediction predict_bracketing(double alpha, double s, double q);

/// Sup-norm-entropy regime: exponent
/// min{ 1/(2+alpha), (q-1)/(q(2-s)+alpha s(q-1)) },
/// threshold (2+alpha(1-s))/(s+alpha(1-s)).
RatePrediction predict_supnorm(double alpha, double s, double q);

/// VC-type regime: exponent 1/(2(2-s)) for alpha<2; 1/(2-s) with a 1/log n
/// flag at alpha=2; 1/(alpha(2-s)) for alpha>2 (beta must be 0 past 2).
/// Tail exponent 4(2-s)/3; two moments suffice.
RatePrediction predict_vc(double alpha, double beta, double s);

RatePrediction predict(const RegimeInput& in);

/// Full finite-sample r_n with the constants kept, for documentation parity
/// with the closed forms. beta only matters for the vc regime.
double rn_with_constants(EntropyRegime regime, double n, double alpha,
                         double beta, double s, double q, double A, double phi,
                         double sigma);

/// (alpha, s) per named class: holder(gamma,d) -> (d/gamma, 2g/(2g+d));
/// sobolev(gamma,d) -> (d/gamma, (2g-1)/(2g+d-1)); lipschitz_1d -> (1, 2/3);
/// holder_union_indicators(gamma) -> (1/gamma, 0).
std::pair<double, double> table_lookup(const std::string& class_name,
                                       double gamma = 1.0, int d = 1);

// --- exact-rational table regeneration ---

struct Rational {
  long long num = 0, den = 1;
  Rational() = default;
  Rational(long long n, long long d);
  double value() const { return static_cast<double>(num) / den; }
  std::string str() const;
  bool is_infinite() const { return den == 0; }
  static Rational infinity() {
    Rational r;
    r.num = 1;
    r.den = 0;
    return r;
  }
};

Rational rat_add(Rational a, Rational b);
Rational rat_mul(Rational a, Rational b);
Rational rat_div(Rational a, Rational b);

struct TableRow {
  std::string space, family;
  Rational alpha, s, moments_indep, moments_ours;
};

/// Envelope growth parameters (s) for the standard classes; gamma rational.
std::vector<TableRow> table1(const std::vector<std::pair<Rational, int>>& gd);

/// Rate summary rows: entropy regime, envelope assumption, moment threshold
/// and rate, as printable strings.
struct Table2Row {
  std::string entropy, envelope, moments, rate;
};
std::vector<Table2Row> table2();

/// (alpha, s, moment requirements) per class, exact rationals.
std::vector<TableRow> table3(const std::vector<std::pair<Rational, int>>& gd);

}  // namespace heavyls
