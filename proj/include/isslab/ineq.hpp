// Scalar differential- and integral-inequality oracles: the comparison
// principle (KL envelope from a decay rate), the forced comparison bound,
// the indefinite linear Gronwall bound, rate-condition fitting for
// indefinite rates, and the classical pointwise/integral inequalities.
// Every "for all t" condition here is checked on a dense grid and reported
// as grid-certified.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isslab/compfun.hpp"
#include "isslab/timefun.hpp"

namespace isslab {

// beta(r, s) = pi^{-1}(pi(r) - s) with pi(s) = int_1^s dtau / theta(tau).
// theta must be positive on (0, r_max]; the quadrature uses a log grid with
// a singularity guard at 1e-12 (pi -> -inf as s -> 0+). beta(r, 0) = r.
KLFn beta_from_theta(const ComparisonFn& theta, double r_max, double t_max,
                     int table_points = 4096);

struct BoundCheckNode {
  double t;
  double value;
  double bound;
};

struct BoundCheckReport {
  bool holds = true;
  double worst_violation = 0.0;  // max(value - bound), clipped at 0
  double max_slack = 0.0;        // max(bound - value)
  double min_slack = 0.0;        // min(bound - value)
  std::optional<BoundCheckNode> worst_node;
  std::size_t nodes_checked = 0;
  double tolerance = 0.0;
};

// Integrates dy/dt = -theta(y) + mu(t) from y0 by RK4 with output at every
// step (steps split at mu's discontinuities) and asserts
//   y(t) <= beta(y0, t - t0) + 2 * int_{t0}^{t} mu(s) ds
// at every output node, with beta from beta_from_theta.
BoundCheckReport forced_comparison_bound(const ComparisonFn& theta,
                                         const TimeFun& mu, double y0,
                                         double horizon, double step = 1e-3,
                                         double tolerance = 1e-7);

struct GronwallResult {
  std::function<double(double)> bound;  // t |-> y0 e^{int nu} + int v e^{...}
  BoundCheckReport report;              // bound vs RK4 solution of the ODE
};

// Indefinite linear Gronwall: bound(t) = y0 exp(int_{0}^{t} nu) +
// int_0^t v(s) exp(int_s^t nu) ds by nested quadrature; verified to dominate
// the RK4 solution of dy/dt = nu(t) y + v(t).
GronwallResult gronwall_linear(const TimeFun& nu, const TimeFun& v, double y0,
                               double horizon, int grid_n = 4096);

// Fitted indefinite-rate data: int_{t0}^{t} nu <= -eta (t-t0) + xi and
// int_{t0}^{t} |psi(tau)| Theta(t,tau) dtau <= rho on the horizon, where
// Theta(t,tau) = exp(int_tau^t nu).
struct RatePair {
  double eta = 0.0;
  double xi = 0.0;
  double rho = 0.0;
};

struct RateFitOptions {
  int grid_n = 2048;
  // When positive, maximize eta subject to xi(eta) <= xi_cap. Otherwise
  // maximize the guaranteed decay at horizon scale, eta*horizon - xi(eta),
  // and break ties toward the smallest eta.
  double xi_cap = -1.0;
};

struct RateFitResult {
  bool feasible = false;
  RatePair pair;
  double objective = 0.0;  // eta*horizon - xi at the fitted point
  std::string reason;      // set when infeasible
};

RateFitResult fit_rate_conditions(const TimeFun& nu, const TimeFun& psi,
                                  double horizon, const RateFitOptions& opts = {});

// Re-verifies a fitted RatePair on a (typically finer) grid.
struct RateVerifyReport {
  bool ok = true;
  double xi_slack = 0.0;   // xi - max over pairs of the integral excess
  double rho_slack = 0.0;  // rho - max Theta-weighted integral
};
RateVerifyReport verify_rate_conditions(const TimeFun& nu, const TimeFun& psi,
                                        const RatePair& pair, double horizon,
                                        int grid_n);

// Classical inequalities, evaluated on the payload; slack = rhs - lhs >= 0.
struct IneqCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
};

// ab <= a^p/p + b^q/q for conjugate p, q.
IneqCheck check_young(double a, double b, double p, double q);
// ab <= (omega/p) a^p + ((p-1)/p) omega^{-1/(p-1)} b^{p/(p-1)}.
IneqCheck check_young_general(double a, double b, double omega, double p);
// int |x nu| <= ||x||_p ||nu||_q on (lo, hi), conjugate p, q.
IneqCheck check_holder(const std::function<double(double)>& x,
                       const std::function<double(double)>& nu, double lo,
                       double hi, double p, double q, int quad_n = 2048);
// Convexity direction: mean of f(x) >= f(mean of x); slack = lhs - rhs here.
IneqCheck check_jensen(const std::function<double(double)>& f_convex,
                       const std::function<double(double)>& x, double lo,
                       double hi, int quad_n = 2048);

enum class IntegralIneq { Young, YoungGeneral, Holder, Jensen };

// Enum-dispatched form of the checks above; unused payload fields are
// ignored by the selected case.
struct IntegralIneqPayload {
  double a = 0.0, b = 0.0;
  double p = 2.0, q = 2.0;
  double omega = 1.0;
  std::function<double(double)> x, nu, f_convex;
  double lo = 0.0, hi = 1.0;
  int quad_n = 2048;
};
IneqCheck integral_inequality_check(IntegralIneq kind,
                                    const IntegralIneqPayload& payload);

}  // namespace isslab
