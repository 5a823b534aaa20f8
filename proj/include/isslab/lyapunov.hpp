// Lyapunov machinery for time-varying linear and semilinear systems:
//   P(t)   = int_t^inf W(tau,t)^T W(tau,t) dtau   (Lyapunov equality solution)
//   V(t,x) = int_t^inf ||W(tau,t) x||^2 dtau      (non-coercive construction)
//   Z(t,x) = ln(1 + V(t,x))                       (bilinear/iISS construction)
// with certified exponential tail truncation, numerical Dini derivatives
// along trajectories, and dissipation-inequality audits.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isslab/compfun.hpp"
#include "isslab/evolution.hpp"
#include "isslab/mildsolve.hpp"
#include "isslab/timefun.hpp"

namespace isslab {

struct QuadratureOptions {
  double tail_tol = 1e-8;   // analytic tail bound k^2 e^{-2wT}/(2w) < tail_tol
  int intervals = 2048;     // Simpson intervals over the truncated window
  double rk4_step = 1e-3;   // propagation substep inside the quadrature
};

// Truncated-quadrature engine behind P and V. The truncation horizon comes
// from the certified (k, w) exponential fit; node layout shifts rigidly with
// t so quadrature error cancels in finite differences.
class QuadraticLyapunov {
 public:
  QuadraticLyapunov(GeneratorSpec gen, ExpFit fit, QuadratureOptions opts = {});

  Mat P(double t) const;
  double V(double t, const Vec& x) const;

  // ||A^T P + P A + dP/dt + I||_F with central-difference dP/dt.
  double lyapunov_residual(double t, double h) const;

  double truncation_horizon() const { return window_; }
  const ExpFit& fit() const { return fit_; }

  // Certified upper-bound constant: V <= k^2/(2w) ||x||^2.
  double upper_bound_constant() const { return fit_.k * fit_.k / (2.0 * fit_.w); }

 private:
  GeneratorSpec gen_;
  Propagator prop_;
  ExpFit fit_;
  QuadratureOptions opts_;
  double window_;
};

// Generic Lyapunov function object (t, x) -> value.
struct LyapunovFn {
  enum class Kind { QuadraticP, NoncoerciveIntegral, LogIiss, UserClosedForm };
  Kind kind = Kind::UserClosedForm;
  std::function<double(double, const Vec&)> eval;
  std::string label = "V";

  double operator()(double t, const Vec& x) const { return eval(t, x); }
};

LyapunovFn make_noncoercive_V(std::shared_ptr<QuadraticLyapunov> engine);
LyapunovFn make_log_iiss_Z(std::shared_ptr<QuadraticLyapunov> engine);

// Forward difference quotients of V along the flow over decreasing h values,
// Richardson-extrapolated from the two smallest.
struct DiniEstimate {
  double value = 0.0;                 // extrapolated estimate
  std::vector<double> quotients;      // raw sequence, one per h
  std::vector<double> h_seq;
};

DiniEstimate dini_derivative(const LyapunovFn& V, const SemilinearSystem& sys,
                             double t, const Vec& x, const InputSignal& u,
                             std::vector<double> h_seq = {1e-2, 1e-3, 1e-4});

// Dissipation forms:
//   Implication:  ||x|| >= kappa(||u||_U)  =>  dV <= -mu(V)
//   Dissipative:  dV <= -eta(||x||) + chi(||u(t)||_U)
//   LinearBound:  dV <= -||x||^2 + eta k^2/(2w) ||x||^2
//                        + k^2/(2 eta w) ||B||_inf^2 ||u(t)||_U^2
//   IspsKlRate:   V >= kappa(||u||) => dV <= -delta(V) + ell(t)
//   IspsIndefinite: V >= kappa(||u||) => dV <= nu(t) V + psi(t)
enum class DissipationForm {
  Implication,
  Dissipative,
  LinearBound,
  IspsKlRate,
  IspsIndefinite
};

struct DissipationParams {
  double tol = 1e-4;  // additive tolerance scale: tol * (1 + ||x||^2)
  // Implication form.
  std::optional<ComparisonFn> kappa;
  std::optional<ComparisonFn> mu_of_V;
  // Dissipative form.
  std::optional<ComparisonFn> eta_of_state;
  std::optional<ComparisonFn> chi_of_input;
  // Linear bound.
  double eta = 1.0;
  double k = 1.0;
  double w = 1.0;
  double b_inf = 1.0;
  // ISpS forms.
  std::optional<ComparisonFn> delta_of_V;
  std::optional<TimeFun> ell;
  std::optional<TimeFun> nu;
  std::optional<TimeFun> psi;
  // Dini refinement used to re-test violations.
  std::vector<double> h_seq = {1e-2, 1e-3};
  std::vector<double> h_seq_refined = {1e-3, 1e-4};
  int samples_per_trajectory = 12;
};

struct DissipationSampleRow {
  double t = 0.0;
  double state_norm = 0.0;
  double input_norm = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs + tolerance
  bool gated_out = false;  // implication premise false: inequality not required
  bool violated = false;
  bool refined_ok = false;  // violation vanished under h-refinement
};

struct DissipationReport {
  std::size_t samples = 0;
  std::size_t violations = 0;          // persistent after refinement
  std::size_t raw_violations = 0;      // before h-refinement
  double violation_fraction = 0.0;
  std::optional<DissipationSampleRow> worst;
  std::vector<DissipationSampleRow> rows;
};

DissipationReport check_dissipation(const LyapunovFn& V,
                                    const SemilinearSystem& sys,
                                    const std::vector<ControlSample>& ensemble,
                                    double horizon, DissipationForm form,
                                    const DissipationParams& params,
                                    const SolveOptions& solve_opts = {});

// CSV export: time, state_norm, input_norm, lhs, rhs, slack.
void write_dissipation_csv(const std::string& path, const DissipationReport& rep);

}  // namespace isslab
