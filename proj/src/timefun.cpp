#include "isslab/timefun.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "isslab/linalg.hpp"

namespace isslab {

TimeFun timefun_from_catalog(const std::string& name,
                             const std::vector<double>& params) {
  auto param = [&](std::size_t i, double dflt) {
    return i < params.size() ? params[i] : dflt;
  };
  TimeFun f;
  if (name == "constant") {
    const double c = param(0, 0.0);
    f.eval = [c](double) { return c; };
    f.label = "constant(" + std::to_string(c) + ")";
  } else if (name == "sine") {
    const double off = param(0, 0.0), amp = param(1, 1.0), freq = param(2, 1.0),
                 ph = param(3, 0.0);
    f.eval = [=](double t) { return off + amp * std::sin(freq * t + ph); };
    f.label = "sine";
  } else if (name == "exp_decay") {
    const double c = param(0, 1.0), a = param(1, 1.0);
    f.eval = [=](double t) { return c * std::exp(-a * t); };
    f.label = "exp_decay";
  } else if (name == "step") {
    const double tj = param(0, 1.0), before = param(1, 0.0), after = param(2, 1.0);
    f.eval = [=](double t) { return t < tj ? before : after; };
    f.discontinuities = {tj};
    f.label = "step";
  } else if (name == "inv_quadratic") {
    const double c = param(0, 1.0);
    f.eval = [=](double t) { return c / (1.0 + t * t); };
    f.label = "inv_quadratic";
  } else if (name == "tcos_damping") {
    f.eval = [](double t) { return -t * std::abs(std::cos(t)); };
    f.label = "tcos_damping";
  } else if (name == "ch3_nu") {
    f.eval = [](double t) { return 2.0 / (1.0 + t * t) - t * std::abs(std::cos(t)); };
    f.label = "ch3_nu";
  } else if (name == "ch3_psi") {
    const double m = param(0, 2.2214414690791831);  // integral of sqrt(tan) on (0, pi/2)
    f.eval = [=](double t) {
      return (2.0 * t * std::exp(-t) + m) * std::abs(std::cos(t));
    };
    f.label = "ch3_psi";
  } else {
    throw std::invalid_argument("timefun catalog: unknown name '" + name + "'");
  }
  return f;
}

TimeFun timefun_from_samples(std::vector<double> ts, std::vector<double> vals) {
  require(!ts.empty() && ts.size() == vals.size(),
          "timefun_from_samples: need matching non-empty arrays");
  for (std::size_t i = 1; i < ts.size(); ++i)
    require(ts[i] > ts[i - 1], "timefun_from_samples: times must increase");
  auto xs = std::make_shared<std::vector<double>>(std::move(ts));
  auto ys = std::make_shared<std::vector<double>>(std::move(vals));
  TimeFun f;
  f.eval = [xs, ys](double t) {
    const auto& x = *xs;
    const auto& y = *ys;
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t hi = std::size_t(it - x.begin());
    std::size_t lo = hi - 1;
    double w = (t - x[lo]) / (x[hi] - x[lo]);
    return y[lo] + w * (y[hi] - y[lo]);
  };
  f.label = "sampled(" + std::to_string(xs->size()) + ")";
  return f;
}

}  // namespace isslab
