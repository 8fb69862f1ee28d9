#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "heavyls/noise.hpp"
#include "heavyls/rng.hpp"

using namespace heavyls;

namespace {

std::vector<double> zeros(int n) { return std::vector<double>(n, 0.0); }

double sample_var(const std::vector<double>& e) {
  double m = 0.0;
  for (double v : e) m += v;
  m /= e.size();
  double acc = 0.0;
  for (double v : e) acc += (v - m) * (v - m);
  return acc / e.size();
}

}  // namespace

TEST_CASE("two_moment_log survival boundary") {
  CHECK(two_moment_log_survival(1.0) == doctest::Approx(1.0));
  CHECK(two_moment_log_survival(0.5) == doctest::Approx(1.0));
  // All mass has |Z| >= 1.
  NoiseSpec spec{NoiseLaw::TwoMomentLog, 3.0, 3.0, SigmaFn::constant(1.0), 42};
  auto e = draw_errors(spec, zeros(20000));
  for (double v : e) CHECK(std::abs(v) >= 1.0);
  // Quantile inverts survival.
  for (double u : {0.9, 0.5, 0.1, 1e-3, 1e-6}) {
    const double t = two_moment_log_quantile(u);
    CHECK(two_moment_log_survival(t) == doctest::Approx(u).epsilon(1e-9));
  }
}

TEST_CASE("degenerate scale gives zero errors") {
  NoiseSpec spec{NoiseLaw::Gaussian, 3.0, 3.0, SigmaFn::constant(0.0), 1};
  auto e = draw_errors(spec, {0.1, 0.5, 0.9});
  for (double v : e) CHECK(v == 0.0);
}

TEST_CASE("sym_pareto standardization") {
  NoiseSpec spec{NoiseLaw::SymPareto, 3.0, 3.0, SigmaFn::constant(1.0), 99};
  auto e = draw_errors(spec, zeros(1000000));
  CHECK(sample_var(e) == doctest::Approx(1.0).epsilon(0.02));
  // Tail index: log-log slope of the empirical survival over the top decile
  // within +-0.3 of -q.
  std::vector<double> a(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) a[i] = std::abs(e[i]);
  std::sort(a.begin(), a.end());
  const std::size_t n = a.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int k = 1; k <= 9; ++k) {
    const std::size_t idx = n - 1 - static_cast<std::size_t>(n * 0.1 * k / 10.0);
    const double t = a[idx];
    const double surv = static_cast<double>(n - idx) / n;
    const double lx = std::log(t), ly = std::log(surv);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++cnt;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-3.0).epsilon(0.1));
}

TEST_CASE("configuration errors") {
  NoiseSpec bad{NoiseLaw::SymPareto, 3.0, 2.0, SigmaFn::constant(1.0), 1};
  CHECK_THROWS_AS(draw_errors(bad, {0.5, 0.5}), ConfigError);
  NoiseSpec t_bad{NoiseLaw::StudentT, 1.5, 3.0,
                  SigmaFn::from_name("linear", 1.0), 1};
  CHECK_THROWS_AS(draw_errors(t_bad, {0.5, 0.5}), ConfigError);
  NoiseSpec t_ok{NoiseLaw::StudentT, 1.5, 3.0, SigmaFn::constant(1.0), 1};
  CHECK(t_ok.violates_cvar());
  CHECK_NOTHROW(draw_errors(t_ok, {0.5, 0.5}));
}

TEST_CASE("empirical moment examples") {
  CHECK(empirical_moment({1, -1, 1, -1}, 3.0) == doctest::Approx(1.0));
  NoiseSpec g{NoiseLaw::Gaussian, 3.0, 3.0, SigmaFn::constant(1.0), 5};
  auto e = draw_errors(g, zeros(1000000));
  CHECK(empirical_moment(e, 2.0) == doctest::Approx(1.0).epsilon(0.01));
  CHECK_THROWS_AS(empirical_moment({}, 2.0), ArgumentError);
}

TEST_CASE("two_moment_log q=2.5 sample moment diverges with sample size") {
  // E|Z|^2.5 is infinite, so the sample moment grows without bound; the
  // growth is driven by the stream maximum and is frozen here at a fixed
  // seed pair (small batch 4.08, large batch 85.3).
  NoiseSpec spec{NoiseLaw::TwoMomentLog, 3.0, 3.0, SigmaFn::constant(1.0), 2024};
  auto small = draw_errors(spec, zeros(10000), 7);
  auto large = draw_errors(spec, zeros(1000000), 57);
  const double m_small = empirical_moment(small, 2.5);
  const double m_large = empirical_moment(large, 2.5);
  CHECK(m_small == doctest::Approx(4.0821).epsilon(1e-3));
  CHECK(m_large == doctest::Approx(85.3164).epsilon(1e-3));
  CHECK(m_large > 2.0 * m_small);
}

TEST_CASE("every law is mean-zero at MC precision") {
  const std::vector<NoiseSpec> specs = {
      {NoiseLaw::Gaussian, 3.0, 3.0, SigmaFn::constant(1.0), 11},
      {NoiseLaw::StudentT, 2.5, 3.0, SigmaFn::constant(1.0), 12},
      {NoiseLaw::SymPareto, 3.0, 2.5, SigmaFn::constant(1.0), 13},
      {NoiseLaw::TwoMomentLog, 3.0, 3.0, SigmaFn::constant(1.0), 14},
  };
  for (const auto& spec : specs) {
    auto e = draw_errors(spec, zeros(1000000));
    double mean = 0.0;
    for (double v : e) mean += v;
    mean /= e.size();
    const double sd = std::sqrt(sample_var(e));
    CHECK(std::abs(mean) <= 4.0 * sd / 1000.0);
  }
}

TEST_CASE("heteroscedastic draws respect the sup-sigma cap") {
  NoiseSpec spec{NoiseLaw::Gaussian, 3.0, 3.0, SigmaFn::from_name("sine2", 2.0), 21};
  Design d = Design::uniform(200000, 3);
  auto x = d.draw();
  auto e = draw_errors(spec, x);
  const double cap = spec.sigma.sup() * spec.sigma.sup();
  const int bins = 20;
  for (int b = 0; b < bins; ++b) {
    double acc = 0.0, acc4 = 0.0;
    int cnt = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (static_cast<int>(x[i] * bins) == b) {
        acc += e[i] * e[i];
        acc4 += e[i] * e[i] * e[i] * e[i];
        ++cnt;
      }
    }
    REQUIRE(cnt > 100);
    const double m2 = acc / cnt;
    const double se = std::sqrt(std::max(acc4 / cnt - m2 * m2, 0.0) / cnt);
    CHECK(m2 <= cap + 3.0 * se);
  }
}

TEST_CASE("reproducibility under fixed seed") {
  NoiseSpec spec{NoiseLaw::StudentT, 2.5, 3.0, SigmaFn::constant(1.5), 77};
  auto x = Design::uniform(100, 4).draw();
  CHECK(draw_errors(spec, x) == draw_errors(spec, x));
  CHECK(draw_errors(spec, x, 1) != draw_errors(spec, x, 2));
}
