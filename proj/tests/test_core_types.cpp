#include <doctest.h>

#include <cmath>

#include "heavyls/core_types.hpp"
#include "heavyls/rng.hpp"

using namespace heavyls;

namespace {

const Design kUniform = Design::uniform(0);

FittedFn random_piecewise_linear(Rng& rng, int knots) {
  std::vector<double> xs, vs;
  xs.push_back(0.0);
  for (int i = 1; i < knots - 1; ++i) xs.push_back(rng.uniform());
  xs.push_back(1.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (std::size_t i = 0; i < xs.size(); ++i) vs.push_back(2.0 * rng.uniform() - 1.0);
  return FittedFn::linear(xs, vs);
}

}  // namespace

TEST_CASE("design invariants") {
  auto d = Design::uniform(64, 7);
  auto xs = d.draw();
  REQUIRE(xs.size() == 64);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(xs[i] >= 0.0);
    CHECK(xs[i] <= 1.0);
    if (i) CHECK(xs[i] >= xs[i - 1]);
  }
  CHECK(d.draw(7) == xs);  // reproducible

  auto g = Design::grid(4);
  auto gx = g.draw();
  CHECK(gx[0] == doctest::Approx(0.125));
  CHECK(gx[3] == doctest::Approx(0.875));

  auto c = Design::custom("tilted", 32, 3);
  auto cx = c.draw();
  CHECK(std::is_sorted(cx.begin(), cx.end()));
  CHECK(c.cdf(1.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.cdf(0.5) == doctest::Approx(0.2 * 0.5 + 0.8 * 0.25).epsilon(1e-6));
  CHECK_THROWS_AS(Design::custom("nope", 8), ConfigError);
}

TEST_CASE("sample validation") {
  auto s = Sample::from_xy({0.5, 0.1, 0.5}, {1.0, 2.0, 3.0});
  CHECK(s.x[0] == 0.1);
  CHECK(s.has_ties);
  CHECK_THROWS_AS(Sample::from_xy({0.1}, {1.0}), ArgumentError);
  CHECK_THROWS_AS(Sample::from_xy({0.1, 1.5}, {1.0, 2.0}), ArgumentError);
  CHECK_THROWS_AS(Sample::from_xy({0.1, 0.2}, {1.0}), ArgumentError);
}

TEST_CASE("fitted function extensions") {
  // Left-continuous steps carry the last value rightward.
  auto f = FittedFn::step({0.25, 0.75}, {1.0, 2.0});
  CHECK(f(0.0) == 1.0);
  CHECK(f(0.25) == 1.0);
  CHECK(f(0.26) == 2.0);
  CHECK(f(0.75) == 2.0);
  CHECK(f(1.0) == 2.0);

  auto g = FittedFn::linear({0.25, 0.5, 0.75}, {0.0, 1.0, 1.0});
  CHECK(g(0.5) == doctest::Approx(1.0));
  CHECK(g(0.375) == doctest::Approx(0.5));
  CHECK(g(0.0) == doctest::Approx(-1.0));  // first segment extrapolated
  CHECK(g(1.0) == doctest::Approx(1.0));   // last segment extrapolated

  // Evaluation at a knot returns the stored value.
  for (std::size_t i = 0; i < g.knots.size(); ++i)
    CHECK(g(g.knots[i]) == doctest::Approx(g.values[i]));
}

TEST_CASE("population norm examples") {
  // ||0 - x|| = 1/sqrt(3)
  auto f0 = FittedFn::step({1.0}, {0.0});
  CHECK(population_l2_distance(f0, RefFn::linear(0.0, 1.0), kUniform) ==
        doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  // f = g -> 0
  auto fx = FittedFn::linear({0.0, 1.0}, {0.0, 1.0});
  CHECK(population_l2_distance(fx, RefFn::linear(0.0, 1.0), kUniform) ==
        doctest::Approx(0.0));
  // step {0 on [0,.5], 1 on (.5,1]} vs 0 -> 1/sqrt(2)
  auto fs = FittedFn::step({0.5, 1.0}, {0.0, 1.0});
  CHECK(population_l2_distance(fs, RefFn::zero(), kUniform) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("empirical norm examples") {
  auto fs = FittedFn::step({0.25, 0.75}, {1.5, 1.5});
  CHECK(empirical_l2_distance(fs, RefFn::zero(), {0.25, 0.75}) ==
        doctest::Approx(1.5));
  auto fpm = FittedFn::step({0.25, 0.75}, {1.0, -1.0});
  CHECK(empirical_l2_distance(fpm, RefFn::zero(), {0.25, 0.75}) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(empirical_l2_distance(fs, RefFn::zero(), {}), ArgumentError);
}

TEST_CASE("non-finite reference rejected") {
  auto f = FittedFn::step({1.0}, {0.0});
  auto bad = RefFn::callable([](double t) { return 1.0 / (t - t); });
  CHECK_THROWS_AS(population_l2_distance(f, bad, kUniform), EvaluationError);
}

TEST_CASE("exact piecewise matches high-resolution quadrature") {
  // 100 random piecewise-quadratic integrands (pw-linear fitted against a
  // global quadratic reference): 1e-10 relative agreement.
  Rng rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    auto f = random_piecewise_linear(rng, 2 + static_cast<int>(rng.uniform() * 6));
    auto g = RefFn::quadratic(rng.normal(), rng.normal(), rng.normal());
    const double exact = population_l2_distance(f, g, kUniform);
    const double quad = population_l2_distance(f, g, kUniform,
                                               L2Method::quadrature(5, 10000));
    CHECK(quad == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("population distance is a metric on random triples") {
  Rng rng(5);
  for (int rep = 0; rep < 60; ++rep) {
    auto fa = random_piecewise_linear(rng, 4);
    auto fb = random_piecewise_linear(rng, 5);
    auto fc = random_piecewise_linear(rng, 3);
    const auto ra = RefFn::from_fitted(fa);
    const auto rb = RefFn::from_fitted(fb);
    const auto rc = RefFn::from_fitted(fc);
    const double ab = population_l2_distance(fa, rb, kUniform);
    const double ba = population_l2_distance(fb, ra, kUniform);
    const double ac = population_l2_distance(fa, rc, kUniform);
    const double cb = population_l2_distance(fc, rb, kUniform);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
    CHECK(ab <= ac + cb + 1e-9);
    CHECK(population_l2_distance(fa, ra, kUniform) == doctest::Approx(0.0));
  }
}

TEST_CASE("custom density norm falls back to quadrature consistently") {
  auto f = FittedFn::linear({0.0, 1.0}, {0.0, 1.0});
  const auto measure = Design::custom("tilted", 0);
  const double a = population_l2_distance(f, RefFn::zero(), measure);
  const double b = population_l2_distance(f, RefFn::zero(), measure,
                                          L2Method::quadrature(8, 2000));
  // int_0^1 x^2 (0.2 + 1.6 x) dx = 0.2/3 + 1.6/4
  CHECK(a == doctest::Approx(std::sqrt(0.2 / 3 + 0.4)).epsilon(1e-9));
  CHECK(b == doctest::Approx(a).epsilon(1e-9));
}
