// Comparison-function algebra: the classes P, K, K-infinity, L and KL that
// stability estimates are phrased in, with grid-certified classification,
// composition, inversion and KL envelope fitting.
//
// Class membership verdicts are always "certified on a finite grid", never
// claims about all reals. Unboundedness (K-infinity) is certified by a
// witness evaluation above a fixed threshold at a large probe argument.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isslab/linalg.hpp"

namespace isslab {

struct ClassReport {
  bool is_p = false;
  bool is_k = false;
  bool is_kinf = false;
  bool is_l = false;
  // First violating sample pair (argument, value) per failed class, if any.
  std::optional<std::pair<double, double>> p_violation;
  std::optional<std::pair<double, double>> k_violation;
  std::optional<std::pair<double, double>> kinf_violation;
  std::optional<std::pair<double, double>> l_violation;
};

// Claimed membership, as declared by the constructor or derived from the
// closure rules under composition. classify() audits claims on a grid.
struct ClaimedClasses {
  bool p = false;
  bool k = false;
  bool kinf = false;
  bool l = false;
};

// Scalar monotone function object on [0, domain_max]. Closed-form members
// come from a fixed catalog; sampled members use monotone piecewise-linear
// interpolation (no overshoot, so class invariants survive interpolation).
class ComparisonFn {
 public:
  enum class Kind { ClosedForm, Sampled };

  ComparisonFn() = default;

  // Catalog: linear(a), power(p[,scale]), exp_decay(a), saturating(),
  // log1p(), identity(), constant(c), zero().
  static ComparisonFn from_catalog(const std::string& name,
                                   const std::vector<double>& params = {});
  static ComparisonFn from_samples(std::vector<double> args, std::vector<double> vals);
  static ComparisonFn from_evaluator(std::function<double(double)> f,
                                     std::string label,
                                     double domain_max = kInfiniteDomain);

  static ComparisonFn identity() { return from_catalog("identity"); }
  static ComparisonFn zero() { return from_catalog("zero"); }

  double operator()(double s) const;

  Kind kind() const { return kind_; }
  double domain_max() const { return domain_max_; }
  const std::string& label() const { return label_; }
  bool is_zero() const { return label_ == "zero"; }
  const ClaimedClasses& claimed() const { return claimed_; }
  ComparisonFn& claim(ClaimedClasses c) {
    claimed_ = c;
    return *this;
  }

  static constexpr double kInfiniteDomain = 1e306;

 private:
  Kind kind_ = Kind::ClosedForm;
  double domain_max_ = kInfiniteDomain;
  std::function<double(double)> eval_;
  std::string label_ = "unset";
  ClaimedClasses claimed_;
  // Sampled representation kept for serialization round trips.
  std::vector<double> sample_args_, sample_vals_;
};

// Classification options; verdicts below are relative to these thresholds.
struct ClassifyOptions {
  double zero_tol = 1e-12;          // |f(0)| below this counts as f(0)=0
  double kinf_witness = 1e6;        // value needed at the probe argument
  double kinf_probe = 1e8;          // probe argument (clamped to domain_max)
  double l_limit_tol = 1e-6;        // f(probe) below this certifies decay to 0
};

// Audits class membership of f on a strictly increasing grid.
// Report is consistent by construction: K implies P, K-infinity implies K.
ClassReport classify(const ComparisonFn& f, const std::vector<double>& grid,
                     const ClassifyOptions& opts = {});

// Uniform grid helper for the default 512-point certification resolution.
std::vector<double> uniform_grid(double lo, double hi, int points = 512);

// (f o g)(s) = f(g(s)). The composite's claimed class follows the closure
// rules: K o K = K, Kinf o Kinf = Kinf, K o L and L o K give L.
ComparisonFn compose(const ComparisonFn& f, const ComparisonFn& g);

// Solves f(x) = y on the bracket by bisection; f must be strictly increasing
// on the bracket (sample-checked) and y within f(bracket).
double invert(const ComparisonFn& f, double y, double lo, double hi,
              double tol = 1e-10);

// Finds an upper bracket end b with f(b) >= y by doubling, then inverts.
double invert_unbounded(const ComparisonFn& f, double y, double tol = 1e-10);

// max{gamma(a + sigma(a)), gamma(b + sigma_inv(b))}; dominates gamma(a+b).
double weak_triangle_bound(const ComparisonFn& gamma, const ComparisonFn& sigma,
                           double a, double b);

// Two-argument class-KL object. Evaluator plus the two certification flags
// from the fitting/construction stage.
class KLFn {
 public:
  KLFn() = default;
  KLFn(std::function<double(double, double)> eval, bool per_r_monotone,
       bool per_t_decreasing, std::string label = "kl")
      : eval_(std::move(eval)),
        per_r_monotone_(per_r_monotone),
        per_t_decreasing_(per_t_decreasing),
        label_(std::move(label)) {}

  double operator()(double r, double t) const { return eval_(r, t); }
  bool per_r_monotone() const { return per_r_monotone_; }
  bool per_t_decreasing() const { return per_t_decreasing_; }
  bool is_kl_on_grid() const { return per_r_monotone_ && per_t_decreasing_; }
  const std::string& label() const { return label_; }

 private:
  std::function<double(double, double)> eval_;
  bool per_r_monotone_ = false;
  bool per_t_decreasing_ = false;
  std::string label_;
};

struct KLSample {
  double initial_norm;
  double elapsed;
  double state_norm;
};

struct FitKLOptions {
  // A fit is flagged non-decaying when the envelope tail exceeds this
  // fraction of the envelope peak on some initial-norm level.
  double decay_ratio = 0.99;
  // Exponential continuation rate past the data horizon when the data do not
  // pin one down.
  double tail_rate_floor = 0.05;
  // Subtracted floor for practical (offset) variants; fit envelopes of
  // max(norm - floor, 0).
  double floor = 0.0;
};

struct KLFit {
  KLFn beta;
  bool decays = true;            // per-level decay check outcome
  double worst_tail_ratio = 0.0; // max over levels of tail/peak
  std::vector<double> levels;    // distinct initial norms (ascending)
  // Fitted table (shared elapsed grid, cumulative-max envelope rows per
  // level); kept for certificate serialization.
  std::vector<double> times;
  std::vector<std::vector<double>> envelope;
  double tail_rate = 0.0;
};

// Fits a dominating KL envelope to trajectory norm samples: per-level
// decreasing majorant in elapsed time, then a cumulative max across
// ascending initial-norm levels (isotone in r by construction).
KLFit fit_KL(const std::vector<KLSample>& ensemble, const FitKLOptions& opts = {});

}  // namespace isslab
