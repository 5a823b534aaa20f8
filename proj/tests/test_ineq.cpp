#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isslab/ineq.hpp"
#include "isslab/rng.hpp"

using namespace isslab;

TEST_CASE("beta_from_theta: linear theta gives exponential decay") {
  auto beta = beta_from_theta(ComparisonFn::identity(), 10.0, 10.0);
  CHECK(beta(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(beta(2.0, 0.0) == doctest::Approx(2.0));
  CHECK(beta(5.0, 3.0) == doctest::Approx(5.0 * std::exp(-3.0)).epsilon(1e-6));
}

TEST_CASE("beta_from_theta: quadratic theta gives algebraic decay") {
  auto beta = beta_from_theta(ComparisonFn::from_catalog("power", {2.0}), 10.0, 10.0);
  // dy/dt = -y^2, y(0)=1 solves to 1/(1+t).
  CHECK(beta(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(beta(1.0, 4.0) == doctest::Approx(0.2).epsilon(1e-5));
}

TEST_CASE("beta_from_theta semigroup-like property for linear theta") {
  auto beta = beta_from_theta(ComparisonFn::identity(), 10.0, 10.0);
  for (double r : {0.5, 2.0, 8.0})
    for (double s : {0.3, 1.0})
      for (double t : {0.5, 2.0}) {
        const double lhs = beta(beta(r, s), t);
        const double rhs = beta(r, s + t);
        CHECK(lhs >= rhs - 1e-5 * (1.0 + rhs));
        CHECK(std::abs(lhs - rhs) < 1e-4 * (1.0 + rhs));  // equality analytically
      }
}

TEST_CASE("beta_from_theta rejects vanishing rates") {
  auto bad = ComparisonFn::from_evaluator(
      [](double s) { return std::max(0.0, s - 1.0); }, "vanishing");
  CHECK_THROWS_AS(beta_from_theta(bad, 10.0, 10.0), std::invalid_argument);
}

TEST_CASE("forced comparison bound: closed forms") {
  // theta(s) = s, mu = 0.1: y(t) = 0.9 e^{-t} + 0.1 <= e^{-t} + 0.2 t.
  auto rep = forced_comparison_bound(ComparisonFn::identity(),
                                     timefun_from_catalog("constant", {0.1}), 1.0,
                                     10.0);
  CHECK(rep.holds);
  CHECK(rep.worst_violation <= rep.tolerance);

  // Unforced case reduces to the beta bound alone (equality path).
  rep = forced_comparison_bound(ComparisonFn::identity(),
                                timefun_from_catalog("constant", {0.0}), 1.0, 5.0);
  CHECK(rep.holds);

  // theta(s) = s^2 with decaying forcing.
  rep = forced_comparison_bound(ComparisonFn::from_catalog("power", {2.0}),
                                timefun_from_catalog("exp_decay", {1.0, 1.0}), 2.0,
                                8.0);
  CHECK(rep.holds);
  CHECK(rep.max_slack > 0.0);

  CHECK_THROWS_AS(
      forced_comparison_bound(ComparisonFn::identity(),
                              timefun_from_catalog("constant", {-1.0}), 1.0, 5.0),
      std::invalid_argument);
}

TEST_CASE("forced comparison bound: 100 random catalog instances") {
  SplitMix64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ComparisonFn theta;
    switch (rng.next_int(3)) {
      case 0:
        theta = ComparisonFn::from_catalog("linear", {rng.uniform(0.2, 3.0)});
        break;
      case 1:
        theta = ComparisonFn::from_catalog("power", {rng.uniform(1.2, 2.5)});
        break;
      default:
        theta = ComparisonFn::from_catalog("saturating", {rng.uniform(0.5, 2.0)});
        break;
    }
    // Piecewise-constant mu <= 1 with a jump.
    const double tj = rng.uniform(1.0, 4.0);
    const double before = rng.uniform(0.0, 1.0), after = rng.uniform(0.0, 1.0);
    auto mu = timefun_from_catalog("step", {tj, before, after});
    const double y0 = rng.uniform(0.0, 10.0);
    auto rep = forced_comparison_bound(theta, mu, y0, 6.0, 2e-3);
    CHECK(rep.holds);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("gronwall_linear: equality case and random rates") {
  // nu = -1, v = 1, y0 = 0: bound(1) = 1 - e^{-1}, equals the solution.
  auto g = gronwall_linear(timefun_from_catalog("constant", {-1.0}),
                           timefun_from_catalog("constant", {1.0}), 0.0, 5.0);
  CHECK(g.bound(1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-6));
  CHECK(g.report.holds);

  // v = 0: bound is y0 exp(int nu).
  auto g2 = gronwall_linear(timefun_from_catalog("sine", {0.0, 1.0, 1.0}),
                            timefun_from_catalog("constant", {0.0}), 2.0, 6.0);
  // int_0^t sin = 1 - cos t.
  CHECK(g2.bound(2.0) ==
        doctest::Approx(2.0 * std::exp(1.0 - std::cos(2.0))).epsilon(1e-6));
  CHECK(g2.report.holds);

  // Indefinite rate with forcing: bound dominates RK4 within 1e-6.
  auto g3 = gronwall_linear(timefun_from_catalog("sine", {0.0, 1.0, 1.0}),
                            timefun_from_catalog("constant", {0.5}), 1.0, 10.0);
  CHECK(g3.report.holds);
  CHECK(g3.report.min_slack >= -1e-6);
  CHECK(g3.report.min_slack <= 1e-5);  // equality up to quadrature error
}

TEST_CASE("gronwall_linear dominates on random continuous rates") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const double off = rng.uniform(-1.0, 0.5), amp = rng.uniform(0.0, 1.5),
                 freq = rng.uniform(0.3, 3.0);
    auto nu = timefun_from_catalog("sine", {off, amp, freq});
    auto v = timefun_from_catalog("sine", {rng.uniform(0.0, 1.0), 0.3,
                                           rng.uniform(0.5, 2.0)});
    auto g = gronwall_linear(nu, v, rng.uniform(0.0, 3.0), 8.0);
    CHECK(g.report.min_slack >= -1e-6 * std::max(1.0, g.bound(8.0)));
  }
}

TEST_CASE("fit_rate_conditions: constant rates") {
  auto zero = timefun_from_catalog("constant", {0.0});
  auto res = fit_rate_conditions(timefun_from_catalog("constant", {-1.0}), zero, 20.0);
  REQUIRE(res.feasible);
  CHECK(res.pair.eta == doctest::Approx(1.0).epsilon(1e-3));
  // xi is zero up to the certified grid allowance (nu_max + eta) * step.
  CHECK(res.pair.xi <= 2.5 * 20.0 / 2048.0);
  CHECK(res.pair.rho == doctest::Approx(0.0));

  auto bad = fit_rate_conditions(timefun_from_catalog("constant", {1.0}), zero, 20.0);
  CHECK_FALSE(bad.feasible);
}

TEST_CASE("fit_rate_conditions: the indefinite-rate example") {
  // nu(t) = 2/(1+t^2) - t|cos t|, psi(t) = (2 t e^{-t} + M)|cos t|.
  auto nu = timefun_from_catalog("ch3_nu");
  auto psi = timefun_from_catalog("ch3_psi");
  const double horizon = 40.0;
  auto res = fit_rate_conditions(nu, psi, horizon, {8192, -1.0});
  REQUIRE(res.feasible);
  CHECK(res.pair.eta > 0.5);
  CHECK(res.pair.rho > 0.0);

  // Re-verification on a 10x finer grid.
  auto ver = verify_rate_conditions(nu, psi, res.pair, horizon, 81920);
  CHECK(ver.ok);

  // Capped at xi = 2 ln(1 + 3 pi / 2) + 2 the largest certified eta is
  // about 1.82, stable across horizons; 4 pi / 3 at that xi fails the grid
  // check (the envelope inequality is violated on (0, pi/2) already).
  const double pi = 3.14159265358979323846;
  const double xi_cap = 2.0 * std::log(1.0 + 1.5 * pi) + 2.0;
  auto capped = fit_rate_conditions(nu, psi, horizon, {8192, xi_cap});
  REQUIRE(capped.feasible);
  CHECK(capped.pair.eta == doctest::Approx(1.82).epsilon(0.03));
  RatePair overclaimed{4.0 * pi / 3.0, xi_cap, 1e6};
  auto bad = verify_rate_conditions(nu, psi, overclaimed, horizon, 8192);
  CHECK_FALSE(bad.ok);
  CHECK(bad.xi_slack < -10.0);
}

TEST_CASE("fit_rate_conditions re-verifies on a finer grid (random rates)") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    auto nu = timefun_from_catalog(
        "sine", {rng.uniform(-2.0, -0.3), rng.uniform(0.0, 1.0), rng.uniform(0.5, 3.0)});
    auto psi = timefun_from_catalog("exp_decay", {rng.uniform(0.0, 2.0), 0.7});
    auto res = fit_rate_conditions(nu, psi, 15.0);
    REQUIRE(res.feasible);
    auto ver = verify_rate_conditions(nu, psi, res.pair, 15.0, 20480);
    CHECK(ver.ok);
  }
}

TEST_CASE("integral inequality checks") {
  auto y = check_young(2.0, 3.0, 2.0, 2.0);
  CHECK(y.lhs == doctest::Approx(6.0));
  CHECK(y.rhs == doctest::Approx(6.5));
  CHECK(y.holds);
  CHECK_THROWS_AS(check_young(1.0, 1.0, 2.0, 3.0), std::invalid_argument);

  auto yg = check_young_general(1.5, 2.5, 0.7, 2.0);
  CHECK(yg.holds);

  // Hoelder equality case: constant functions on (0,1).
  auto h = check_holder([](double) { return 1.0; }, [](double) { return 1.0; },
                        0.0, 1.0, 2.0, 2.0);
  CHECK(h.lhs == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(h.slack == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(h.holds);

  // Jensen for f(s)=s^2, x(z)=z on (0,1): mean of square 1/3 >= square of mean 1/4.
  auto j = check_jensen([](double s) { return s * s; }, [](double z) { return z; },
                        0.0, 1.0);
  CHECK(j.lhs == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(j.rhs == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(j.holds);
}

TEST_CASE("enum-dispatched integral inequality checks") {
  IntegralIneqPayload pl;
  pl.a = 2.0;
  pl.b = 3.0;
  auto y = integral_inequality_check(IntegralIneq::Young, pl);
  CHECK(y.holds);
  CHECK(y.slack == doctest::Approx(0.5));

  pl.x = [](double z) { return z; };
  pl.f_convex = [](double s) { return s * s; };
  auto j = integral_inequality_check(IntegralIneq::Jensen, pl);
  CHECK(j.holds);
}
