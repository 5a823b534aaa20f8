// Mild solutions of time-varying semilinear systems
//   dx/dt = A(t) x + B(t) u + Psi(t, x, u)
// with piecewise-right-continuous inputs: an exponential midpoint scheme on
// the variation-of-constants form
//   x(t) = W(t, t_k) x_k + int_{t_k}^{t} W(t, s) Psi_eff(s, x(s), u(s)) ds,
// the integral by midpoint quadrature with a half-step predictor. Steps
// never straddle input discontinuities; the state is continuous across them.
// Blow-up (the BIC obstruction) is detected by a norm threshold and recorded
// as the maximal-time marker.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "isslab/evolution.hpp"
#include "isslab/linalg.hpp"

namespace isslab {

// Piecewise-right-continuous input signal with an explicit discontinuity
// set. Each piece evaluator is continuous on [start, next_start).
class InputSignal {
 public:
  struct Piece {
    double start;
    std::function<Vec(double)> eval;
  };

  InputSignal() = default;
  InputSignal(std::vector<Piece> pieces, int dim, std::string label);

  static InputSignal zero(int dim = 1);
  static InputSignal constant(Vec value);
  // Scalar catalog entries, broadcast over an optional spatial profile.
  static InputSignal constant(double value, const Vec& profile = {1.0});
  static InputSignal step(double t_jump, double before, double after,
                          const Vec& profile = {1.0});
  static InputSignal sine(double amplitude, double freq, double phase = 0.0,
                          const Vec& profile = {1.0});
  static InputSignal sampled(std::vector<double> times, std::vector<Vec> values);

  Vec value(double t) const;  // right-continuous evaluation
  int dim() const { return dim_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<double>& discontinuities() const { return discontinuities_; }
  const std::string& label() const { return label_; }
  bool is_zero() const { return label_ == "zero"; }

  // Grid-certified sup over [0, horizon] of value_norm(u(t)).
  double sup_norm(double horizon,
                  const std::function<double(const Vec&)>& value_norm,
                  int grid_points = 512) const;

 private:
  std::vector<Piece> pieces_;
  std::vector<double> discontinuities_;
  int dim_ = 1;
  std::string label_ = "zero";
};

struct SemilinearSystem {
  GeneratorSpec gen;
  // Input operator: nullopt means no B term; the function returns B(t).
  std::optional<std::function<Mat(double)>> input_op;
  int input_dim = 1;
  // Nonlinearity Psi(t, x, u_value); nullopt for linear systems.
  std::optional<std::function<Vec(double, const Vec&, const Vec&)>> nonlinearity;
  std::optional<double> lipschitz_hint;
  // Grid-weighted L2 state norm: ||x|| = sqrt(weight * sum x_i^2). Weight 1
  // is the Euclidean norm; dz matches L2(0,l) statements for discretized
  // PDEs.
  double state_norm_weight = 1.0;
  std::string label = "system";

  double state_norm(const Vec& x) const {
    return std::sqrt(state_norm_weight * dot(x, x));
  }
  // Norm of an input value (sup over components, the PC(0,l) convention).
  double input_value_norm(const Vec& u) const {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
  }
  int dim() const { return gen.dim(); }

  static SemilinearSystem linear(GeneratorSpec g, Mat b);
  static SemilinearSystem linear_scalar(double a, double b);
};

struct Trajectory {
  enum class Status { Complete, BlowUp, StepFailure };
  struct Node {
    double t;
    Vec x;
  };
  std::vector<Node> nodes;
  Status status = Status::Complete;
  double t_max = 0.0;      // maximal time reached (blow-up / failure marker)
  double input_sup = 0.0;  // sup of the input value norm over the run
  std::string input_label;

  bool complete() const { return status == Status::Complete; }
  const Vec& terminal() const { return nodes.back().x; }
};

struct SolveOptions {
  double step = 1e-2;
  double blowup_threshold = 1e12;
  double min_step = 1e-10;
  // Nodes kept in the trajectory: every step when the count stays below
  // max_nodes, else a uniform stride (deterministic).
  std::size_t max_nodes = 2048;
};

// Exponential midpoint integration (order 2 on smooth problems).
Trajectory solve_mild(const SemilinearSystem& sys, double t0, const Vec& x0,
                      const InputSignal& u, double horizon,
                      const SolveOptions& opts = {});

// Classical RK4 on the plain ODE form; cross-check oracle for non-stiff
// problems.
Trajectory solve_rk4(const SemilinearSystem& sys, double t0, const Vec& x0,
                     const InputSignal& u, double horizon, double step);

inline constexpr double kMildSchemeOrder = 2.0;

struct ControlAxiomReport {
  bool identity_ok = true;       // Sigma_1
  bool causality_ok = true;      // Sigma_2
  double continuity_modulus = 0.0;  // Sigma_3: max adjacent-node jump
  bool cocycle_ok = true;        // Sigma_4
  double max_cocycle_residual = 0.0;
  std::string detail;
};

struct ControlSample {
  double t0;
  Vec x0;
  InputSignal u;
};

ControlAxiomReport check_control_axioms(const SemilinearSystem& sys,
                                        const std::vector<ControlSample>& samples,
                                        double horizon, double tol,
                                        const SolveOptions& opts = {});

// Max finite-difference ratio ||Psi(t,x,u)-Psi(t,y,u)|| / ||x-y|| over
// random pairs in the state/input ball; sanity gate before integration.
double lipschitz_probe(const SemilinearSystem& sys, double state_radius,
                       double input_radius, double t_lo, double t_hi,
                       int samples = 200, std::uint64_t seed = 1);

// CSV export: header time, x_1..x_n, input_norm.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const SemilinearSystem& sys, const InputSignal& u);

}  // namespace isslab
