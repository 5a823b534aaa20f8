// Time-varying propagators W(t,s) for scalar, dense-matrix and diagonal
// generators, plus evolution-family axiom checks and stability
// classification (uniform bound, attractivity table, exponential fit,
// Bohl window bound).
//
// Scalar and diagonal generators commute with themselves across time, so
// W(t,s) = exp(int_s^t A) is computed by quadrature of the rate (exact piece
// sums for piecewise-constant rates). Dense time-varying matrices use
// fixed-step 4th-order integration of the matrix/vector ODE; constant
// matrices use the matrix exponential, cached per step size.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "isslab/linalg.hpp"

namespace isslab {

class GeneratorSpec {
 public:
  enum class Form { ScalarPiecewise, MatrixTimeVarying, DiagonalSpectral };

  // Piecewise-constant scalar rate: value breaks[i].second on
  // [breaks[i].first, breaks[i+1].first).
  static GeneratorSpec scalar_piecewise(std::vector<std::pair<double, double>> breaks);
  // Smooth scalar rate.
  static GeneratorSpec scalar(std::function<double(double)> rate,
                              std::string label = "scalar");
  static GeneratorSpec constant_matrix(Mat a, std::string label = "constant_matrix");
  static GeneratorSpec matrix_timevarying(std::function<Mat(double)> eval, int dim,
                                          std::string label = "matrix_tv",
                                          std::vector<double> discontinuities = {});
  // Piecewise-constant matrix blocks: value blocks[i].second on
  // [blocks[i].first, blocks[i+1].first). Propagation uses exact
  // exponentials per block.
  static GeneratorSpec matrix_piecewise(std::vector<std::pair<double, Mat>> blocks);
  static GeneratorSpec diagonal(Vec rates, std::string label = "diagonal");
  static GeneratorSpec diagonal_timevarying(std::function<Vec(double)> eval, int dim,
                                            std::string label = "diagonal_tv");

  // Catalog: example_A1(), constant_matrix, sinusoidal_perturbation
  // (A0 + amp*sin(freq t)*A1), diagonal_heat(nu, ell, n), diagonal_KS(rho, n).
  static GeneratorSpec example_A1();
  static GeneratorSpec sinusoidal_perturbation(Mat a0, Mat a1, double amp,
                                               double freq);
  static GeneratorSpec diagonal_heat(double nu, double ell, int n);
  static GeneratorSpec diagonal_ks(double varrho, int n);

  Form form() const { return form_; }
  int dim() const { return dim_; }
  bool is_constant() const { return constant_; }
  bool is_piecewise_constant() const { return piecewise_constant_; }
  const std::vector<double>& discontinuities() const { return discontinuities_; }
  const std::string& label() const { return label_; }

  double scalar_at(double t) const;
  Vec diagonal_at(double t) const;
  Mat matrix_at(double t) const;

  // A(t) x for any form.
  Vec apply(double t, const Vec& x) const;

 private:
  Form form_ = Form::ScalarPiecewise;
  int dim_ = 1;
  bool constant_ = false;
  bool piecewise_constant_ = false;
  std::vector<double> discontinuities_;
  std::string label_;
  std::vector<std::pair<double, double>> breaks_;  // piecewise-constant scalar
  std::function<double(double)> scalar_eval_;
  std::function<Vec(double)> diag_eval_;
  std::function<Mat(double)> matrix_eval_;
  Mat const_matrix_;
  friend class Propagator;
};

struct PropagatorOptions {
  double rk4_step = 1e-3;       // substep for the dense time-varying path
  double quad_tol = 1e-12;      // adaptive quadrature tol for smooth rates
  double blowup_norm = 1e300;   // overflow guard
};

// Two-parameter propagator; apply(t, s, x) = W(t,s) x for t >= s.
// W(t,t) x = x exactly.
class Propagator {
 public:
  Propagator(const GeneratorSpec& gen, PropagatorOptions opts = {});

  Vec apply(double t, double s, const Vec& x) const;
  // Assembled W(t,s) as a dense matrix (columns = images of basis vectors
  // for the dense path; closed forms otherwise).
  Mat matrix(double t, double s) const;
  // ||W(t,s)||: |W| for scalars, max rate for diagonals, induced 2-norm by
  // power iteration for matrices.
  double norm(double t, double s) const;

  // Scalar/diagonal exponent int_s^t of the rate(s).
  double scalar_exponent(double t, double s) const;

  const GeneratorSpec& generator() const { return *gen_; }
  int dim() const { return gen_->dim(); }
  double order() const;  // local accuracy order of the stepping scheme

 private:
  Vec diag_exponents(double t, double s) const;
  Mat dense_matrix(double t, double s) const;
  std::shared_ptr<const GeneratorSpec> gen_;
  PropagatorOptions opts_;
  mutable std::map<long long, Mat> expm_cache_;  // keyed by quantized dt
};

struct AxiomViolation {
  std::string axiom;
  double t = 0.0, r = 0.0, s = 0.0;
  double residual = 0.0;
};

struct EvolutionAxiomReport {
  bool identity_ok = true;
  bool cocycle_ok = true;
  double max_cocycle_residual = 0.0;
  double continuity_modulus = 0.0;   // max step-to-step change over the grid
  double sup_norm = 0.0;             // sup ||W(t,s)|| over grid pairs
  bool uniform_bound_certified = true;  // no growth witness found
  std::vector<AxiomViolation> violations;
};

// Verifies identity and the cocycle over all grid triples, estimates the
// continuity modulus, and reports the sup norm. Uniform boundedness is a
// classification output: a growth witness (late windows beating early ones)
// is reported, not thrown.
EvolutionAxiomReport check_evolution_axioms(const Propagator& w,
                                            const std::vector<double>& grid,
                                            const std::vector<Vec>& probes,
                                            double tol);

struct ExpFit {
  double k = 1.0;
  double w = 0.0;
};

struct StabilityClassification {
  std::optional<double> uniform_bound_N;
  std::vector<std::pair<double, double>> attractivity_table;  // (eps, T(eps))
  std::optional<ExpFit> exp_fit;  // ||W(t,t0)|| <= k e^{-w (t-t0)} on grid
  double bohl_window_K = 1.0;
  bool partial = false;  // horizon too short for the requested search
};

struct ClassifyStabilityOptions {
  double t0_max = 4.0;
  double t0_step = 0.5;
  double sample_step = 0.25;  // elapsed-time resolution
  double min_decay_w = 1e-3;  // smallest admissible fitted decay rate
};

StabilityClassification classify_stability(const Propagator& w, double horizon,
                                           const std::vector<double>& eps_list,
                                           const ClassifyStabilityOptions& opts = {});

// Grid maximum of sup_{t in [t0, t0+1]} ||W(t, t0)|| over the given t0 grid.
// When a classification with uniform attractivity is supplied, the derived
// uniform bound N = max(K^T, kappa) is attached.
struct WindowBoundResult {
  double K = 1.0;
  std::optional<double> derived_uniform_bound;
};
WindowBoundResult window_bound(const Propagator& w,
                               const std::vector<double>& t0_grid,
                               const StabilityClassification* cls = nullptr,
                               int window_samples = 21);

}  // namespace isslab
