#include "isslab/ineq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "isslab/linalg.hpp"

namespace isslab {

namespace {

constexpr double kPiCutoff = 1e-12;  // singularity guard near 0

struct PiTable {
  std::vector<double> logs;  // log arguments, uniform
  std::vector<double> pi;    // pi at exp(logs), strictly increasing

  double eval(double s) const {
    const double y = std::log(std::max(s, kPiCutoff));
    if (y <= logs.front()) return pi.front();
    if (y >= logs.back()) return pi.back();
    const double step = logs[1] - logs[0];
    std::size_t j = std::size_t((y - logs.front()) / step);
    j = std::min(j, logs.size() - 2);
    const double w = (y - logs[j]) / step;
    return pi[j] + w * (pi[j + 1] - pi[j]);
  }

  // Inverse by binary search on the monotone table.
  double inverse(double target) const {
    if (target <= pi.front()) return std::exp(logs.front());
    if (target >= pi.back()) return std::exp(logs.back());
    auto it = std::upper_bound(pi.begin(), pi.end(), target);
    std::size_t hi = std::size_t(it - pi.begin());
    std::size_t lo = hi - 1;
    const double w = (target - pi[lo]) / (pi[hi] - pi[lo]);
    return std::exp(logs[lo] + w * (logs[hi] - logs[lo]));
  }
};

}  // namespace

KLFn beta_from_theta(const ComparisonFn& theta, double r_max, double t_max,
                     int table_points) {
  require(r_max > 0.0 && t_max > 0.0, "beta_from_theta: bad ranges");
  (void)t_max;  // the table covers all s; t_max documents the intended horizon

  // theta must be positive on (0, r_max].
  for (int i = 1; i <= 256; ++i) {
    const double s = r_max * double(i) / 256.0;
    if (!(theta(s) > 0.0))
      throw std::invalid_argument("beta_from_theta: theta vanishes on (0, r_max]");
  }

  auto table = std::make_shared<PiTable>();
  const int n = std::max(128, table_points);
  const double y_lo_target = std::log(kPiCutoff);
  const double y_hi_target = std::log(r_max) + 1e-9;
  // Uniform log grid with y = 0 (s = 1) as an exact node, so the anchored
  // accumulation pi(1) = 0 never differences large numbers (the integrand
  // blows up toward the cutoff for superlinear theta).
  double h = (y_hi_target - y_lo_target) / (n - 1);
  const long long below = llround(std::ceil(-y_lo_target / h));
  const double y_lo = -double(below) * h;
  const long long above = llround(std::ceil(std::max(y_hi_target, h) / h));
  const long long total = below + above + 1;
  table->logs.resize(total);
  table->pi.resize(total);
  // Integrand of pi in the log variable: tau / theta(tau), tau = e^y.
  auto g = [&theta](double y) {
    const double tau = std::exp(y);
    return tau / theta(tau);
  };
  for (long long j = 0; j < total; ++j) table->logs[j] = y_lo + double(j) * h;
  auto segment = [&](long long j) {  // integral over [logs[j], logs[j+1]]
    const double ya = table->logs[j], yb = table->logs[j + 1];
    return (h / 6.0) * (g(ya) + 4.0 * g(0.5 * (ya + yb)) + g(yb));
  };
  table->pi[below] = 0.0;
  for (long long j = below; j + 1 < total; ++j)
    table->pi[j + 1] = table->pi[j] + segment(j);
  for (long long j = below; j - 1 >= 0; --j)
    table->pi[j - 1] = table->pi[j] - segment(j - 1);

  auto eval = [table](double r, double s) {
    if (r <= 0.0) return 0.0;
    if (s <= 0.0) return r;  // identity at s = 0 by definition
    const double target = table->eval(r) - s;
    if (target <= table->pi.front()) return 0.0;  // decayed into the guard zone
    return table->inverse(target);
  };
  return KLFn(eval, /*per_r_monotone=*/true, /*per_t_decreasing=*/true,
              "comparison_principle");
}

namespace {

// One RK4 step of dy/dt = f(t, y).
double rk4_step(const std::function<double(double, double)>& f, double t,
                double y, double h) {
  const double k1 = f(t, y);
  const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
  const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
  const double k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Splits [0, horizon] at the sorted interior discontinuities.
std::vector<std::pair<double, double>> split_at(
    const std::vector<double>& discs, double horizon) {
  std::vector<std::pair<double, double>> segs;
  double start = 0.0;
  for (double d : discs) {
    if (d > start && d < horizon) {
      segs.push_back({start, d});
      start = d;
    }
  }
  segs.push_back({start, horizon});
  return segs;
}

}  // namespace

BoundCheckReport forced_comparison_bound(const ComparisonFn& theta,
                                         const TimeFun& mu, double y0,
                                         double horizon, double step,
                                         double tolerance) {
  require(y0 >= 0.0 && horizon > 0.0 && step > 0.0,
          "forced_comparison_bound: bad arguments");
  // mu must be nonnegative (probe).
  for (int i = 0; i <= 64; ++i) {
    const double t = horizon * double(i) / 64.0;
    if (mu(t) < -1e-12)
      throw std::invalid_argument("forced_comparison_bound: mu must be nonnegative");
  }

  const double r_max = std::max(1.0, 2.0 * y0);
  const KLFn beta = beta_from_theta(theta, r_max, horizon);

  auto rhs = [&](double t, double y) { return -theta(std::max(y, 0.0)) + mu(t); };

  BoundCheckReport rep;
  rep.tolerance = tolerance;
  rep.min_slack = std::numeric_limits<double>::infinity();
  double y = y0, mu_int = 0.0, t = 0.0;
  auto check = [&](double tc, double yc) {
    const double bound = beta(y0, tc) + 2.0 * mu_int;
    const double slack = bound - yc;
    ++rep.nodes_checked;
    rep.max_slack = std::max(rep.max_slack, slack);
    rep.min_slack = std::min(rep.min_slack, slack);
    if (-slack > rep.worst_violation) {
      rep.worst_violation = -slack;
      rep.worst_node = BoundCheckNode{tc, yc, bound};
    }
    if (-slack > tolerance) rep.holds = false;
  };
  check(0.0, y);

  for (auto [a, b] : split_at(mu.discontinuities, horizon)) {
    const int steps = std::max(1, int(std::ceil((b - a) / step)));
    const double h = (b - a) / steps;
    for (int k = 0; k < steps; ++k) {
      const double t0 = a + k * h;
      const double mu_a = mu(t0), mu_b = mu(std::min(t0 + h, b - 1e-15));
      y = std::max(0.0, rk4_step(rhs, t0, y, h));
      mu_int += 0.5 * h * (mu_a + mu_b);
      t = t0 + h;
      check(t, y);
      if (!std::isfinite(y))
        throw std::runtime_error("forced_comparison_bound: integrator failure at t=" +
                                 std::to_string(t));
    }
  }
  return rep;
}

GronwallResult gronwallLinearImpl(const TimeFun& nu, const TimeFun& v, double y0,
                                  double horizon, int grid_n) {
  require(horizon > 0.0 && grid_n >= 16, "gronwall_linear: bad arguments");
  const int n = grid_n;
  const double h = horizon / n;

  auto ts = std::make_shared<std::vector<double>>(std::size_t(n) + 1);
  auto bound_vals = std::make_shared<std::vector<double>>(std::size_t(n) + 1);

  // Cumulative N(t) = int_0^t nu by per-interval Simpson, plus the forced
  // part S(t) = int_0^t v(s) e^{N(t)-N(s)} ds via a multiplicative
  // recurrence (stable for strongly decaying nu).
  std::vector<double> bigN(std::size_t(n) + 1, 0.0);
  double s_part = 0.0;
  (*ts)[0] = 0.0;
  (*bound_vals)[0] = y0;
  for (int j = 0; j < n; ++j) {
    const double ta = j * h, tb = (j + 1) * h, tm = ta + 0.5 * h;
    const double seg = (h / 6.0) * (nu(ta) + 4.0 * nu(tm) + nu(tb));
    const double n_mid = bigN[j] + (h / 12.0) * (nu(ta) + 4.0 * nu(ta + 0.25 * h) + nu(tm));
    bigN[j + 1] = bigN[j] + seg;
    const double e_full = std::exp(bigN[j + 1] - bigN[j]);
    const double e_half = std::exp(bigN[j + 1] - n_mid);
    const double local = (h / 6.0) * (v(ta) * e_full + 4.0 * v(tm) * e_half + v(tb));
    s_part = s_part * e_full + local;
    (*ts)[j + 1] = tb;
    (*bound_vals)[j + 1] = y0 * std::exp(bigN[j + 1]) + s_part;
  }

  GronwallResult out;
  out.bound = [ts, bound_vals](double t) {
    const auto& x = *ts;
    const auto& y = *bound_vals;
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t hi = std::size_t(it - x.begin());
    std::size_t lo = hi - 1;
    const double w = (t - x[lo]) / (x[hi] - x[lo]);
    return y[lo] + w * (y[hi] - y[lo]);
  };

  // Verify domination over the RK4 solution of dy/dt = nu(t) y + v(t) on the
  // same grid.
  auto rhs = [&](double t, double y) { return nu(t) * y + v(t); };
  BoundCheckReport rep;
  const double scale = std::max(1.0, std::abs(y0));
  rep.tolerance = 1e-6 * scale;
  rep.min_slack = std::numeric_limits<double>::infinity();
  double y = y0;
  for (int j = 0; j <= n; ++j) {
    const double bound = (*bound_vals)[j];
    const double slack = bound - y;
    ++rep.nodes_checked;
    rep.max_slack = std::max(rep.max_slack, slack);
    rep.min_slack = std::min(rep.min_slack, slack);
    if (-slack > rep.worst_violation) {
      rep.worst_violation = -slack;
      rep.worst_node = BoundCheckNode{(*ts)[j], y, bound};
    }
    if (-slack > rep.tolerance) rep.holds = false;
    if (j < n) y = rk4_step(rhs, j * h, y, h);
  }
  out.report = rep;
  return out;
}

GronwallResult gronwall_linear(const TimeFun& nu, const TimeFun& v, double y0,
                               double horizon, int grid_n) {
  return gronwallLinearImpl(nu, v, y0, horizon, grid_n);
}

namespace {

// Cumulative integral of nu on a uniform grid by per-interval Simpson.
std::vector<double> cumulative_integral(const TimeFun& f, double horizon, int n) {
  std::vector<double> acc(std::size_t(n) + 1, 0.0);
  const double h = horizon / n;
  for (int j = 0; j < n; ++j) {
    const double ta = j * h, tb = (j + 1) * h;
    acc[j + 1] = acc[j] + (h / 6.0) * (f(ta) + 4.0 * f(0.5 * (ta + tb)) + f(tb));
  }
  return acc;
}

// Smallest xi such that int_{t0}^{t} nu <= -eta (t-t0) + xi over grid pairs.
double xi_of_eta(const std::vector<double>& bigN, double horizon, double eta) {
  const int n = int(bigN.size()) - 1;
  const double h = horizon / n;
  double run_min = 0.0, xi = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double g = bigN[j] + eta * (j * h);
    run_min = std::min(run_min, g);
    xi = std::max(xi, g - run_min);
  }
  return xi;
}

double rho_of(const TimeFun& psi, const std::vector<double>& bigN, double horizon) {
  const int n = int(bigN.size()) - 1;
  const double h = horizon / n;
  double acc = 0.0, rho = 0.0;
  for (int j = 0; j < n; ++j) {
    const double ta = j * h, tb = (j + 1) * h;
    const double dN = bigN[j + 1] - bigN[j];
    // Trapezoid with the Theta weight anchored at tb.
    const double local = 0.5 * h * (std::abs(psi(ta)) * std::exp(dN) + std::abs(psi(tb)));
    acc = acc * std::exp(dN) + local;
    rho = std::max(rho, acc);
  }
  return rho;
}

}  // namespace

RateFitResult fit_rate_conditions(const TimeFun& nu, const TimeFun& psi,
                                  double horizon, const RateFitOptions& opts) {
  require(horizon > 0.0, "fit_rate_conditions: bad horizon");
  const int n = std::max(64, opts.grid_n);
  const std::vector<double> bigN = cumulative_integral(nu, horizon, n);

  RateFitResult out;
  auto objective = [&](double eta) { return eta * horizon - xi_of_eta(bigN, horizon, eta); };

  double eta_star = 0.0;
  if (opts.xi_cap > 0.0) {
    // xi(eta) is nondecreasing in eta: bisect for the largest feasible eta.
    if (xi_of_eta(bigN, horizon, 1e-9) > opts.xi_cap) {
      out.reason = "no eta > 0 satisfies the xi cap";
      return out;
    }
    double lo = 1e-9, hi = 1.0;
    while (xi_of_eta(bigN, horizon, hi) <= opts.xi_cap && hi < 1e6) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (xi_of_eta(bigN, horizon, mid) <= opts.xi_cap ? lo : hi) = mid;
    }
    eta_star = lo;
  } else {
    // Coarse log sweep, then golden-section refine (objective is concave).
    double best_eta = 1e-3, best_j = objective(1e-3);
    for (int i = 0; i <= 60; ++i) {
      const double eta = std::pow(10.0, -3.0 + 5.0 * double(i) / 60.0);
      const double j = objective(eta);
      if (j > best_j) {
        best_j = j;
        best_eta = eta;
      }
    }
    double a = best_eta / 3.0, b = best_eta * 3.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = objective(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = objective(x1);
      }
    }
    eta_star = 0.5 * (a + b);
    const double j_star = objective(eta_star);
    // Tie-break toward the smallest eta achieving (almost) the same value.
    double lo = 0.0, hi = eta_star;
    const double tol_j = 1e-9 * std::max(1.0, std::abs(j_star));
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (objective(mid) >= j_star - tol_j ? hi : lo) = mid;
    }
    eta_star = hi;
  }

  // Grid-resolution allowances so the fitted pair re-verifies on any finer
  // grid: between nodes the envelope functions move by at most their slope
  // bound times the step.
  const double step = horizon / n;
  double nu_max = 0.0, psi_max = 0.0;
  for (int j = 0; j <= n; ++j) {
    nu_max = std::max(nu_max, std::abs(nu(j * step)));
    psi_max = std::max(psi_max, std::abs(psi(j * step)));
  }
  const double xi_star = xi_of_eta(bigN, horizon, eta_star) +
                         (nu_max + eta_star) * step;
  out.objective = eta_star * horizon - xi_star;
  if (eta_star <= 1e-9 || out.objective <= 0.0) {
    out.reason = "rate is not eventually negative on the horizon";
    return out;
  }
  out.feasible = true;
  out.pair.eta = eta_star;
  out.pair.xi = xi_star;
  const double rho_raw = rho_of(psi, bigN, horizon);
  out.pair.rho = rho_raw + (nu_max * rho_raw + psi_max) * step;
  return out;
}

RateVerifyReport verify_rate_conditions(const TimeFun& nu, const TimeFun& psi,
                                        const RatePair& pair, double horizon,
                                        int grid_n) {
  const int n = std::max(64, grid_n);
  const std::vector<double> bigN = cumulative_integral(nu, horizon, n);
  RateVerifyReport rep;
  const double excess = xi_of_eta(bigN, horizon, pair.eta);
  rep.xi_slack = pair.xi - excess;
  const double rho_measured = rho_of(psi, bigN, horizon);
  rep.rho_slack = pair.rho - rho_measured;
  const double tol = 1e-6 * std::max(1.0, pair.xi + pair.rho);
  rep.ok = rep.xi_slack >= -tol && rep.rho_slack >= -tol;
  return rep;
}

IneqCheck check_young(double a, double b, double p, double q) {
  require(a >= 0.0 && b >= 0.0, "young: a, b must be nonnegative");
  require(p > 1.0 && q > 1.0, "young: p, q must exceed 1");
  if (std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-9)
    throw std::invalid_argument("young: p, q must be conjugate");
  IneqCheck c;
  c.name = "young";
  c.lhs = a * b;
  c.rhs = std::pow(a, p) / p + std::pow(b, q) / q;
  c.slack = c.rhs - c.lhs;
  c.holds = c.slack >= -1e-12 * std::max(1.0, c.rhs);
  return c;
}

IneqCheck check_young_general(double a, double b, double omega, double p) {
  require(a >= 0.0 && b >= 0.0, "young_general: a, b must be nonnegative");
  require(omega > 0.0 && p > 1.0, "young_general: need omega > 0, p > 1");
  IneqCheck c;
  c.name = "young_general";
  c.lhs = a * b;
  c.rhs = (omega / p) * std::pow(a, p) +
          std::pow(omega, -1.0 / (p - 1.0)) * ((p - 1.0) / p) *
              std::pow(b, p / (p - 1.0));
  c.slack = c.rhs - c.lhs;
  c.holds = c.slack >= -1e-12 * std::max(1.0, c.rhs);
  return c;
}

IneqCheck check_holder(const std::function<double(double)>& x,
                       const std::function<double(double)>& nu, double lo,
                       double hi, double p, double q, int quad_n) {
  require(hi > lo, "holder: bad interval");
  if (std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-9)
    throw std::invalid_argument("holder: p, q must be conjugate");
  IneqCheck c;
  c.name = "holder";
  c.lhs = simpson([&](double z) { return std::abs(x(z) * nu(z)); }, lo, hi, quad_n);
  const double xp = simpson([&](double z) { return std::pow(std::abs(x(z)), p); },
                            lo, hi, quad_n);
  const double nq = simpson([&](double z) { return std::pow(std::abs(nu(z)), q); },
                            lo, hi, quad_n);
  c.rhs = std::pow(xp, 1.0 / p) * std::pow(nq, 1.0 / q);
  c.slack = c.rhs - c.lhs;
  c.holds = c.slack >= -1e-9 * std::max(1.0, c.rhs);
  return c;
}

IneqCheck integral_inequality_check(IntegralIneq kind,
                                    const IntegralIneqPayload& pl) {
  switch (kind) {
    case IntegralIneq::Young:
      return check_young(pl.a, pl.b, pl.p, pl.q);
    case IntegralIneq::YoungGeneral:
      return check_young_general(pl.a, pl.b, pl.omega, pl.p);
    case IntegralIneq::Holder:
      require(bool(pl.x) && bool(pl.nu), "holder payload needs x and nu");
      return check_holder(pl.x, pl.nu, pl.lo, pl.hi, pl.p, pl.q, pl.quad_n);
    case IntegralIneq::Jensen:
      require(bool(pl.f_convex) && bool(pl.x), "jensen payload needs f and x");
      return check_jensen(pl.f_convex, pl.x, pl.lo, pl.hi, pl.quad_n);
  }
  throw std::logic_error("integral_inequality_check: unreachable");
}

IneqCheck check_jensen(const std::function<double(double)>& f_convex,
                       const std::function<double(double)>& x, double lo,
                       double hi, int quad_n) {
  require(hi > lo, "jensen: bad interval");
  IneqCheck c;
  c.name = "jensen";
  const double len = hi - lo;
  c.lhs = simpson([&](double z) { return f_convex(x(z)); }, lo, hi, quad_n) / len;
  c.rhs = f_convex(simpson(x, lo, hi, quad_n) / len);
  c.slack = c.lhs - c.rhs;  // convexity: mean of f >= f of mean
  c.holds = c.slack >= -1e-9 * std::max(1.0, std::abs(c.lhs));
  return c;
}

}  // namespace isslab
