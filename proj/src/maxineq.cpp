#include "heavyls/maxineq.hpp"

#include <algorithm>
#include <cmath>

#include "heavyls/parallel.hpp"
#include "heavyls/rng.hpp"

namespace heavyls {

void MaxIneqConfig::validate() const {
  if (n < 1 || p < 1) throw ConfigError("MaxIneqConfig: n, p must be >= 1");
  if (q < 2.0) throw ConfigError("MaxIneqConfig: q must be >= 2");
  if (entry_law != NoiseLaw::Gaussian && entry_law != NoiseLaw::SymPareto)
    throw ConfigError("MaxIneqConfig: entry law must be gaussian or sym_pareto");
  if (entry_law == NoiseLaw::SymPareto && q >= law_param)
    throw ConfigError("MaxIneqConfig: sym_pareto needs q < tail index");
  if (col_scale != "equal" && col_scale != "decaying")
    throw ConfigError("MaxIneqConfig: col_scale must be equal or decaying");
}

std::vector<double> MaxIneqConfig::scales() const {
  std::vector<double> s(p, 1.0);
  if (col_scale == "decaying")
    for (int j = 0; j < p; ++j) s[j] = 1.0 / std::sqrt(1.0 + j);
  return s;
}

double bound_b1(double V, double logp1, double q, double sum_xi_q) {
  if (V < 0.0 || logp1 < 0.0 || sum_xi_q < 0.0 || q < 2.0)
    throw ArgumentError("bound_b1: invalid arguments");
  return std::sqrt(6.0 * V * logp1) +
         std::sqrt(2.0) * std::pow(3.0 * logp1, 1.0 - 1.0 / q) *
             std::pow(2.0 * sum_xi_q, 1.0 / q);
}

namespace {

NoiseSpec entry_spec(const MaxIneqConfig& c) {
  NoiseSpec spec;
  spec.law = c.entry_law;
  spec.q_index = c.law_param;
  spec.sigma = SigmaFn::constant(1.0);
  return spec;
}

// P(max_j |s_j Z_j| > t) for independent standardized Z_j.
double row_max_survival(const NoiseSpec& spec, const std::vector<double>& s,
                        double t) {
  double log_cdf = 0.0;
  for (double sc : s) {
    const double surv =
        sc > 0.0 ? law_survival(spec, t / sc) : 0.0;
    if (surv >= 1.0) return 1.0;
    log_cdf += std::log1p(-surv);
  }
  return -std::expm1(log_cdf);
}

}  // namespace

double analytic_row_max_moment(const MaxIneqConfig& config, double q) {
  config.validate();
  const NoiseSpec spec = entry_spec(config);
  const std::vector<double> s = config.scales();
  const double smax = *std::max_element(s.begin(), s.end());

  // E[xi^q] = int_0^inf q t^{q-1} P(xi > t) dt. The integrand is smooth; cut
  // the domain where the union bound drops below 1e-13 and add the closed
  // Pareto tail (gaussian tails vanish before the cut).
  double cut;
  if (config.entry_law == NoiseLaw::Gaussian) {
    cut = smax * (10.0 + std::sqrt(2.0 * std::log(1.0 + config.p)));
  } else {
    const double c = sym_pareto_cq(config.law_param);
    // p * (c t / smax)^{-qi} = 1e-13
    cut = (smax / c) *
          std::pow(config.p / 1e-13, 1.0 / config.law_param);
  }
  const int panels = 4000;
  double acc = 0.0;
  // integrate on a log grid from tiny to cut
  const double t0 = 1e-8 * smax;
  acc += std::pow(t0, q);  // P(xi > t) = 1 below any atom-free t0 cutoff
  const double L0 = std::log(t0), L1 = std::log(cut);
  for (int i = 0; i < panels; ++i) {
    const double la = L0 + (L1 - L0) * i / panels;
    const double lb = L0 + (L1 - L0) * (i + 1) / panels;
    auto f = [&](double lt) {
      const double t = std::exp(lt);
      return q * std::pow(t, q) * row_max_survival(spec, s, t);  // dt = t dlt
    };
    acc += (lb - la) / 6.0 * (f(la) + 4.0 * f(0.5 * (la + lb)) + f(lb));
  }
  if (config.entry_law == NoiseLaw::SymPareto) {
    // union-bound tail: sum_j int_cut^inf q t^{q-1} (c t / s_j)^{-qi} dt
    const double c = sym_pareto_cq(config.law_param);
    const double qi = config.law_param;
    for (double sc : s) {
      if (sc <= 0.0) continue;
      acc += q * std::pow(c / sc, -qi) * std::pow(cut, q - qi) / (qi - q);
    }
  }
  return acc;
}

VerifyResult verify_b1(const MaxIneqConfig& config, int reps) {
  config.validate();
  if (reps < 1000) throw ArgumentError("verify_b1: reps must be >= 1000");
  const NoiseSpec spec = entry_spec(config);
  const std::vector<double> s = config.scales();

  VerifyResult out;
  out.config = config;
  const double var1 = 1.0;  // entries standardized to unit variance
  double smax = 0.0;
  for (double sc : s) smax = std::max(smax, sc);
  out.v_np = config.n * smax * smax * var1;
  out.sum_xi_q = config.n * analytic_row_max_moment(config, config.q);
  out.bound = bound_b1(out.v_np, std::log1p(static_cast<double>(config.p)),
                       config.q, out.sum_xi_q);
  // Lemma-8-style comparison: the second term scales with log(1+p) rather
  // than its square root, with the max over all rows inside the moment.
  {
    MaxIneqConfig allrows = config;
    const double exi2 = analytic_row_max_moment(allrows, 2.0);
    // E[max_i xi_i^2] <= (n E[xi^q'])^{2/q'} with q' = q; cheap version uses
    // n^{2/q} * ||xi||_q^2 which captures the n-growth of the max.
    const double emax2 =
        std::min(config.n * exi2,
                 std::pow(config.n * analytic_row_max_moment(allrows, config.q),
                          2.0 / config.q));
    out.bound_lemma8 =
        std::sqrt(6.0 * out.v_np * std::log1p(config.p)) +
        3.0 * std::log1p(config.p) * std::sqrt(std::max(emax2, 0.0));
  }

  const bool is_gauss = spec.law == NoiseLaw::Gaussian;
  const double cq = is_gauss ? 1.0 : sym_pareto_cq(spec.q_index);
  const double inv_qi = is_gauss ? 0.0 : 1.0 / spec.q_index;
  const int chunk = 64;
  const int nchunks = (reps + chunk - 1) / chunk;
  std::vector<double> partial(nchunks, 0.0);
  parallel_for(nchunks, [&](int ci) {
    double acc = 0.0;
    const int lo = ci * chunk, hi = std::min(reps, lo + chunk);
    std::vector<double> colsum(config.p);
    for (int r = lo; r < hi; ++r) {
      Rng rng(mix_seed(config.seed, r));
      std::fill(colsum.begin(), colsum.end(), 0.0);
      for (int i = 0; i < config.n; ++i) {
        for (int j = 0; j < config.p; ++j) {
          const double z = is_gauss
                               ? rng.normal()
                               : rng.sign() *
                                     std::pow(rng.uniform(), -inv_qi) / cq;
          colsum[j] += s[j] * z;
        }
      }
      double mx = 0.0;
      for (double v : colsum) mx = std::max(mx, std::abs(v));
      acc += mx;
    }
    partial[ci] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  out.mc_estimate = total / reps;
  out.slack = out.bound - out.mc_estimate;
  if (out.slack < 0.0)
    throw InvariantViolation(
        "verify_b1: Monte Carlo estimate exceeds the finite-maximum bound");
  return out;
}

GrowthRegression maxstat_growth(const std::vector<int>& sizes, int n, int reps,
                                std::uint64_t seed) {
  if (sizes.empty()) throw ArgumentError("maxstat_growth: empty size list");
  if (!std::is_sorted(sizes.begin(), sizes.end()))
    throw ArgumentError("maxstat_growth: sizes must be sorted ascending");
  const int nmax = *std::max_element(sizes.begin(), sizes.end());
  GrowthRegression out;
  out.sizes = sizes;
  std::vector<std::vector<double>> partial(reps);
  parallel_for(reps, [&](int r) {
    Rng rng(mix_seed(seed, r));
    std::vector<double> eps(n), x(n);
    for (int i = 0; i < n; ++i) {
      eps[i] = rng.normal();
      x[i] = rng.uniform();
    }
    std::vector<double>& maxima = partial[r];
    maxima.assign(sizes.size(), 0.0);
    double running = 0.0;
    std::size_t pos = 0;
    for (int j = 1; j <= nmax && pos < sizes.size(); ++j) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i)
        sum += eps[i] * std::cos(6.283185307179586 * j * x[i]);
      running = std::max(running, std::abs(sum) / std::sqrt(n));
      while (pos < sizes.size() && sizes[pos] == j) {
        maxima[pos] = running;
        ++pos;
      }
    }
  });
  out.emax.assign(sizes.size(), 0.0);
  for (int r = 0; r < reps; ++r)
    for (std::size_t k = 0; k < sizes.size(); ++k) out.emax[k] += partial[r][k];
  for (double& v : out.emax) v /= reps;

  // OLS of E[max] on sqrt(log N)
  const int m = static_cast<int>(sizes.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int k = 0; k < m; ++k) {
    const double xk = std::sqrt(std::log(static_cast<double>(sizes[k])));
    const double yk = out.emax[k];
    sx += xk;
    sy += yk;
    sxx += xk * xk;
    sxy += xk * yk;
    syy += yk * yk;
  }
  const double det = m * sxx - sx * sx;
  out.slope = (m * sxy - sx * sy) / det;
  out.intercept = (sy - out.slope * sx) / m;
  double ss_res = 0.0, ss_tot = 0.0;
  for (int k = 0; k < m; ++k) {
    const double xk = std::sqrt(std::log(static_cast<double>(sizes[k])));
    const double pred = out.intercept + out.slope * xk;
    ss_res += (out.emax[k] - pred) * (out.emax[k] - pred);
    ss_tot += (out.emax[k] - sy / m) * (out.emax[k] - sy / m);
  }
  out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

}  // namespace heavyls
