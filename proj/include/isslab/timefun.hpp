// Scalar functions of time used for rates, residuals and forcing terms.
// Specified in configs by catalog name + parameters, or sampled from CSV,
// matching the comparison-function conventions.
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace isslab {

struct TimeFun {
  std::function<double(double)> eval;
  std::vector<double> discontinuities;  // sorted; empty when continuous
  std::string label = "unset";

  double operator()(double t) const { return eval(t); }
};

// Catalog: constant(c), sine(offset, amp, freq[, phase]), exp_decay(c, a),
// step(t_jump, before, after), inv_quadratic(c) = c/(1+t^2),
// tcos_damping() = -t|cos t|, ch3_nu() = 2/(1+t^2) - t|cos t|,
// ch3_psi(M) = (2 t e^{-t} + M)|cos t|.
TimeFun timefun_from_catalog(const std::string& name,
                             const std::vector<double>& params = {});

// Piecewise-linear interpolant through (t, value) samples.
TimeFun timefun_from_samples(std::vector<double> ts, std::vector<double> vals);

}  // namespace isslab
