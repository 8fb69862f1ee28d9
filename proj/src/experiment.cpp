#include "heavyls/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "heavyls/parallel.hpp"
#include "heavyls/rng.hpp"

namespace heavyls {

namespace {

// Per-(cell, replication) RNG purposes, all derived from the master seed so
// replications are order-free and parallel-safe.
enum StreamPurpose : std::uint64_t {
  kDesignStream = 0,
  kNoiseStream = 1,
  kHoldoutStream = 2,
  kTwinNoiseStream = 3,
};

std::uint64_t cell_seed(std::uint64_t master, int n_index, int rep,
                        StreamPurpose purpose) {
  return mix_seed(mix_seed(master, static_cast<std::uint64_t>(n_index) * 4 +
                                        purpose),
                  static_cast<std::uint64_t>(rep));
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile_of(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

}  // namespace

void ExperimentSpec::validate(bool rate_mode) const {
  cls.validate();
  noise.validate();
  RefFn::named(f0);  // throws on unknown truth
  if (n_grid.empty()) throw ConfigError("ExperimentSpec: empty n_grid");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()))
    throw ConfigError("ExperimentSpec: n_grid must be increasing");
  for (int n : n_grid)
    if (n < 2) throw ConfigError("ExperimentSpec: n must be >= 2");
  if (rate_mode) {
    if (reps < 50) throw ConfigError("ExperimentSpec: rate runs need reps >= 50");
    const double decades = std::log10(static_cast<double>(n_grid.back()) /
                                      n_grid.front());
    if (n_grid.size() > 1 && decades < 1.5)
      throw ConfigError("ExperimentSpec: n_grid must span >= 1.5 decades");
  }
  long long fits = static_cast<long long>(n_grid.size()) * reps;
  if (fits > fit_budget)
    throw ConfigError("ExperimentSpec: fit budget exceeded");
  if (misspecified && cls.kind == ShapeKind::Monotone && f0 == "zero")
    throw ConfigError("ExperimentSpec: misspecified mode needs f0 outside the class");
}

double ExperimentSpec::noise_q() const {
  switch (noise.law) {
    case NoiseLaw::Gaussian: return 1e6;  // effectively infinite moments
    case NoiseLaw::StudentT: return noise.df;
    case NoiseLaw::SymPareto: return noise.q_index;
    case NoiseLaw::TwoMomentLog: return 2.0;
  }
  return 2.0;
}

RatePrediction ExperimentSpec::prediction() const {
  const double q = std::max(noise_q(), 2.0);
  switch (cls.kind) {
    case ShapeKind::Monotone:
      // Constant truths put the class in the VC regime with s = 1 (up to a
      // log correction); other truths fall back to bracketing with s = 0.
      if (f0 == "zero") return predict_vc(0.0, 1.0, 1.0);
      return predict_bracketing(1.0, 0.0, q);
    case ShapeKind::Convex:
      return predict_bracketing(0.5, 2.0 / 3.0, q);
    case ShapeKind::Holder: {
      const auto [alpha, s] = table_lookup("holder", cls.gamma, 1);
      return predict_bracketing(alpha, s, q);
    }
  }
  throw ArgumentError("prediction: unknown class");
}

std::string ExperimentSpec::prediction_regime() const {
  if (cls.kind == ShapeKind::Monotone && f0 == "zero") return "vc_type";
  return "bracketing_l2";
}

ExponentFit loglog_fit(const std::vector<double>& ns,
                       const std::vector<double>& errs) {
  if (ns.size() != errs.size() || ns.size() < 3)
    throw ArgumentError("loglog_fit: need >= 3 points");
  const int m = static_cast<int>(ns.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    if (!(errs[i] > 0.0)) throw ArgumentError("loglog_fit: errors must be > 0");
    const double x = std::log(ns[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double det = m * sxx - sx * sx;
  ExponentFit fit;
  fit.slope = (m * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / m;
  // HC1 sandwich for the slope
  const double xbar = sx / m;
  double sxx_c = 0.0, meat = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = std::log(ns[i]) - xbar;
    const double e = std::log(errs[i]) - (fit.intercept + fit.slope * std::log(ns[i]));
    sxx_c += x * x;
    meat += x * x * e * e;
  }
  const double dof = std::max(m - 2, 1);
  fit.se = std::sqrt(meat * m / dof) / std::max(sxx_c, 1e-300);
  fit.ci_lo = fit.slope - 1.96 * fit.se;
  fit.ci_hi = fit.slope + 1.96 * fit.se;
  return fit;
}

namespace {

struct CellTask {
  int n_index, rep;
};

// One replication: draw, fit, measure. Returns (error, converged).
std::pair<double, bool> run_cell(const ExperimentSpec& spec, int n_index,
                                 int rep, const RefFn& truth,
                                 const RefFn& target, const NoiseSpec& noise) {
  const int n = spec.n_grid[n_index];
  std::vector<double> x = spec.design.draw_n(
      n, cell_seed(spec.master_seed, n_index, rep, kDesignStream));
  const StreamPurpose noise_purpose =
      noise.law == spec.noise.law ? kNoiseStream : kTwinNoiseStream;
  std::vector<double> eps = draw_errors(
      noise, x, cell_seed(spec.master_seed, n_index, rep, noise_purpose));
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = truth(x[i]) + eps[i];

  std::optional<double> phi = spec.cls.phi;
  if (spec.phi_log_c > 0.0)
    phi = spec.phi_log_c * std::sqrt(std::log(static_cast<double>(n)));
  FitResult fit = fit_shape(Sample::from_xy(std::move(x), std::move(y)),
                            spec.cls, phi);

  double err;
  if (spec.norm == ExperimentSpec::NormKind::Population) {
    err = population_l2_distance(fit.fn, target, spec.design);
  } else {
    std::vector<double> holdout = spec.design.draw_n(
        4 * n, cell_seed(spec.master_seed, n_index, rep, kHoldoutStream));
    err = empirical_l2_distance(fit.fn, target, holdout);
  }
  return {err, fit.report.status == SolveReport::Status::Converged};
}

}  // namespace

FittedFn misspecified_target(const ShapeClass& cls, const RefFn& f0,
                             int resolution) {
  if (resolution < 16) throw ArgumentError("misspecified_target: resolution too small");
  std::vector<double> x(resolution), y(resolution);
  for (int i = 0; i < resolution; ++i) {
    x[i] = (i + 0.5) / resolution;
    y[i] = f0(x[i]);
  }
  return fit_shape(Sample::from_xy(std::move(x), std::move(y)), cls, cls.phi)
      .fn;
}

RateReport run_rate_experiment(const ExperimentSpec& spec) {
  spec.validate(true);
  const RefFn truth = RefFn::named(spec.f0);
  RefFn target = truth;
  if (spec.misspecified)
    target = RefFn::from_fitted(
        misspecified_target(spec.cls, truth, spec.target_resolution));

  const int cells = static_cast<int>(spec.n_grid.size());
  RateReport report;
  report.raw_errors.assign(cells, std::vector<double>(spec.reps, 0.0));
  std::vector<std::vector<char>> ok(cells, std::vector<char>(spec.reps, 1));

  parallel_for(cells * spec.reps, [&](int task) {
    const int n_index = task / spec.reps;
    const int rep = task % spec.reps;
    auto [err, converged] =
        run_cell(spec, n_index, rep, truth, target, spec.noise);
    report.raw_errors[n_index][rep] = err;
    ok[n_index][rep] = converged ? 1 : 0;
  });

  int failures = 0;
  for (int c = 0; c < cells; ++c) {
    RateCell cell;
    cell.n = spec.n_grid[c];
    const auto& errs = report.raw_errors[c];
    double mean = 0.0;
    for (double e : errs) mean += e;
    mean /= errs.size();
    double var = 0.0;
    for (double e : errs) var += (e - mean) * (e - mean);
    var /= errs.size();
    cell.mean_error = mean;
    cell.median_error = median_of(errs);
    cell.q90_error = quantile_of(errs, 0.9);
    cell.mc_se = std::sqrt(var / errs.size());
    for (char c2 : ok[c])
      if (!c2) ++cell.solver_failures;
    failures += cell.solver_failures;
    report.per_n.push_back(cell);
  }
  report.degraded =
      failures > 0.01 * static_cast<double>(cells) * spec.reps;

  const RatePrediction pred = spec.prediction();
  report.predicted_exponent = pred.exponent;
  report.predicted_regime = spec.prediction_regime();

  // Noiseless feasible runs interpolate to solver tolerance; the exponent
  // fit is meaningless there.
  bool all_tiny = true;
  for (const auto& cell : report.per_n)
    if (cell.median_error > 1e-7) all_tiny = false;
  if (all_tiny) {
    report.fit_skipped = true;
    return report;
  }

  std::vector<double> ns, meds;
  for (const auto& cell : report.per_n) {
    ns.push_back(cell.n);
    meds.push_back(std::max(cell.median_error, 1e-300));
  }
  report.fit = loglog_fit(ns, meds);
  report.verdict_margin = std::abs(report.fit.slope + pred.exponent);
  return report;
}

double hill_estimator(const std::vector<double>& values, int k) {
  if (k < 2 || k >= static_cast<int>(values.size()))
    throw ArgumentError("hill_estimator: need 2 <= k < size");
  std::vector<double> v = values;
  std::sort(v.begin(), v.end(), std::greater<>());
  const double pivot = v[k];
  if (!(pivot > 0.0)) throw ArgumentError("hill_estimator: pivot must be > 0");
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += std::log(v[i] / pivot);
  if (acc <= 0.0) throw ArgumentError("hill_estimator: degenerate top order statistics");
  return k / acc;
}

TailReport run_tail_experiment(const ExperimentSpec& spec, int n,
                               std::vector<double> thresholds, int hill_k) {
  ExperimentSpec local = spec;
  local.n_grid = {n};
  local.validate(false);
  if (spec.reps < 1000)
    throw ConfigError("run_tail_experiment: tail work needs reps >= 1000");
  const RefFn truth = RefFn::named(spec.f0);
  RefFn target = truth;
  if (spec.misspecified)
    target = RefFn::from_fitted(
        misspecified_target(spec.cls, truth, spec.target_resolution));

  TailReport report;
  report.n = n;
  report.reps = spec.reps;
  const RatePrediction pred = local.prediction();
  report.predicted_exponent = pred.exponent;
  report.rn = std::pow(static_cast<double>(n), pred.exponent);

  NoiseSpec gauss = spec.noise;
  gauss.law = NoiseLaw::Gaussian;

  report.scaled_errors.resize(spec.reps);
  report.gauss_scaled.resize(spec.reps);
  std::vector<char> ok(spec.reps, 1);
  parallel_for(spec.reps, [&](int rep) {
    auto [err, conv] = run_cell(local, 0, rep, truth, target, spec.noise);
    report.scaled_errors[rep] = report.rn * err;
    auto [gerr, gconv] = run_cell(local, 0, rep, truth, target, gauss);
    report.gauss_scaled[rep] = report.rn * gerr;
    ok[rep] = (conv && gconv) ? 1 : 0;
  });
  int failures = 0;
  for (char c : ok)
    if (!c) ++failures;
  report.degraded = failures > 0.01 * spec.reps;

  std::sort(report.scaled_errors.begin(), report.scaled_errors.end());
  std::sort(report.gauss_scaled.begin(), report.gauss_scaled.end());

  std::sort(thresholds.begin(), thresholds.end());
  for (double d : thresholds) {
    const auto it = std::lower_bound(report.scaled_errors.begin(),
                                     report.scaled_errors.end(), d);
    const int exceed =
        static_cast<int>(report.scaled_errors.end() - it);
    if (exceed < 20) {
      report.dropped_thresholds.push_back(d);
      continue;
    }
    report.thresholds.push_back(d);
    report.survival.push_back(static_cast<double>(exceed) / spec.reps);
    const auto git = std::lower_bound(report.gauss_scaled.begin(),
                                      report.gauss_scaled.end(), d);
    report.gauss_survival.push_back(
        static_cast<double>(report.gauss_scaled.end() - git) / spec.reps);
  }

  report.hill_k =
      hill_k > 0 ? hill_k
                 : std::max(20, static_cast<int>(0.05 * spec.reps));
  report.hill_index = hill_estimator(report.scaled_errors, report.hill_k);
  report.gauss_hill = hill_estimator(report.gauss_scaled, report.hill_k);
  return report;
}

}  // namespace heavyls
