#include "isslab/compfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

namespace isslab {

namespace {

// Piecewise-linear interpolation through strictly increasing sample args.
double pl_interp(const std::vector<double>& xs, const std::vector<double>& ys,
                 double s) {
  if (s <= xs.front()) return ys.front();
  if (s >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), s);
  std::size_t hi = std::size_t(it - xs.begin());
  std::size_t lo = hi - 1;
  double w = (s - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

}  // namespace

ComparisonFn ComparisonFn::from_catalog(const std::string& name,
                                        const std::vector<double>& params) {
  auto param = [&](std::size_t i, double dflt) {
    return i < params.size() ? params[i] : dflt;
  };
  ComparisonFn f;
  f.kind_ = Kind::ClosedForm;
  if (name == "linear") {
    const double a = param(0, 1.0);
    require(a > 0.0, "linear: slope must be positive");
    f.eval_ = [a](double s) { return a * s; };
    f.label_ = "linear(" + std::to_string(a) + ")";
  } else if (name == "power") {
    const double p = param(0, 2.0);
    const double c = param(1, 1.0);
    require(p > 0.0 && c > 0.0, "power: exponent and scale must be positive");
    f.eval_ = [p, c](double s) { return c * std::pow(s, p); };
    f.label_ = "power(" + std::to_string(p) + "," + std::to_string(c) + ")";
  } else if (name == "exp_decay") {
    const double a = param(0, 1.0);
    require(a > 0.0, "exp_decay: rate must be positive");
    f.eval_ = [a](double s) { return std::exp(-a * s); };
    f.label_ = "exp_decay(" + std::to_string(a) + ")";
  } else if (name == "saturating") {
    const double c = param(0, 1.0);
    require(c > 0.0, "saturating: scale must be positive");
    f.eval_ = [c](double s) { return c * s / (1.0 + s); };
    f.label_ = "saturating(" + std::to_string(c) + ")";
  } else if (name == "log1p") {
    const double a = param(0, 1.0);
    require(a > 0.0, "log1p: scale must be positive");
    f.eval_ = [a](double s) { return std::log1p(a * s); };
    f.label_ = "log1p(" + std::to_string(a) + ")";
  } else if (name == "identity") {
    f.eval_ = [](double s) { return s; };
    f.label_ = "identity";
  } else if (name == "constant") {
    const double c = param(0, 1.0);
    f.eval_ = [c](double) { return c; };
    f.label_ = "constant(" + std::to_string(c) + ")";
  } else if (name == "zero") {
    f.eval_ = [](double) { return 0.0; };
    f.label_ = "zero";
  } else {
    throw std::invalid_argument("ComparisonFn catalog: unknown name '" + name + "'");
  }

  if (name == "linear" || name == "power" || name == "log1p" || name == "identity")
    f.claimed_ = {true, true, true, false};
  else if (name == "saturating")
    f.claimed_ = {true, true, false, false};
  else if (name == "exp_decay")
    f.claimed_ = {false, false, false, true};
  return f;
}

ComparisonFn ComparisonFn::from_samples(std::vector<double> args,
                                        std::vector<double> vals) {
  require(!args.empty() && args.size() == vals.size(),
          "from_samples: need matching non-empty arrays");
  for (std::size_t i = 1; i < args.size(); ++i)
    require(args[i] > args[i - 1], "from_samples: arguments must be strictly increasing");
  ComparisonFn f;
  f.kind_ = Kind::Sampled;
  f.domain_max_ = args.back();
  auto xs = std::make_shared<std::vector<double>>(std::move(args));
  auto ys = std::make_shared<std::vector<double>>(std::move(vals));
  f.sample_args_ = *xs;
  f.sample_vals_ = *ys;
  f.eval_ = [xs, ys](double s) { return pl_interp(*xs, *ys, s); };
  f.label_ = "sampled(" + std::to_string(xs->size()) + ")";
  return f;
}

ComparisonFn ComparisonFn::from_evaluator(std::function<double(double)> f,
                                          std::string label, double domain_max) {
  ComparisonFn g;
  g.kind_ = Kind::ClosedForm;
  g.eval_ = std::move(f);
  g.label_ = std::move(label);
  g.domain_max_ = domain_max;
  return g;
}

double ComparisonFn::operator()(double s) const {
  if (!eval_) throw std::logic_error("ComparisonFn: evaluating unset function");
  if (s < 0.0 || s > domain_max_)
    throw std::domain_error("ComparisonFn: argument " + std::to_string(s) +
                            " outside [0, domain_max]");
  return eval_(s);
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  require(points >= 2 && hi > lo, "uniform_grid: bad range");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = lo + (hi - lo) * double(i) / double(points - 1);
  return g;
}

ClassReport classify(const ComparisonFn& f, const std::vector<double>& grid,
                     const ClassifyOptions& opts) {
  require(!grid.empty(), "classify: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "classify: grid must be strictly increasing");
  require(grid.front() >= 0.0 && grid.back() <= f.domain_max(),
          "classify: grid outside domain");

  ClassReport rep;
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = f(grid[i]);

  // P: f(0) = 0 and f > 0 away from 0.
  const double f0 = grid.front() == 0.0 ? vals.front() : f(0.0);
  rep.is_p = std::abs(f0) <= opts.zero_tol;
  if (!rep.is_p) rep.p_violation = {0.0, f0};
  for (std::size_t i = 0; i < grid.size() && rep.is_p; ++i) {
    if (grid[i] > 0.0 && vals[i] <= 0.0) {
      rep.is_p = false;
      rep.p_violation = {grid[i], vals[i]};
    }
  }

  // K: P plus strict increase; the violation pair holds the two arguments.
  rep.is_k = rep.is_p;
  if (!rep.is_k) rep.k_violation = rep.p_violation;
  for (std::size_t i = 1; i < grid.size() && rep.is_k; ++i) {
    if (vals[i] <= vals[i - 1]) {
      rep.is_k = false;
      rep.k_violation = {grid[i - 1], grid[i]};
    }
  }

  // K-infinity: K plus an unboundedness witness at the probe argument.
  rep.is_kinf = rep.is_k;
  if (!rep.is_kinf) rep.kinf_violation = rep.k_violation;
  if (rep.is_kinf) {
    const double probe = std::min(opts.kinf_probe, f.domain_max());
    const double w = f(probe);
    if (!(w > opts.kinf_witness)) {
      rep.is_kinf = false;
      rep.kinf_violation = {probe, w};
    }
  }

  // L: strict decrease with decay to 0 at the probe.
  rep.is_l = true;
  for (std::size_t i = 1; i < grid.size() && rep.is_l; ++i) {
    if (vals[i] >= vals[i - 1]) {
      rep.is_l = false;
      rep.l_violation = {grid[i - 1], grid[i]};
    }
  }
  if (rep.is_l) {
    const double probe = std::min(opts.kinf_probe, f.domain_max());
    const double w = f(probe);
    if (!(w <= opts.l_limit_tol)) {
      rep.is_l = false;
      rep.l_violation = {probe, w};
    }
  }
  return rep;
}

ComparisonFn compose(const ComparisonFn& f, const ComparisonFn& g) {
  // Eager probe: the reachable range of g must stay inside f's domain.
  const double g_hi = std::min(g.domain_max(), 1e8);
  if (g(g_hi) > f.domain_max() || g(0.0) > f.domain_max())
    throw std::domain_error("compose: range of g exceeds domain of f");
  ComparisonFn h = ComparisonFn::from_evaluator(
      [f, g](double s) {
        const double gs = g(s);
        if (gs > f.domain_max())
          throw std::domain_error("compose: range of g exceeds domain of f");
        return f(gs);
      },
      f.label() + " o " + g.label(), g.domain_max());
  // Closure rules: K o K = K, Kinf o Kinf = Kinf, K o L and L o K give L.
  const auto& cf = f.claimed();
  const auto& cg = g.claimed();
  ClaimedClasses cc;
  cc.p = cf.p && cg.p;
  cc.k = cf.k && cg.k;
  cc.kinf = cf.kinf && cg.kinf;
  cc.l = (cf.k && cg.l) || (cf.l && cg.k);
  h.claim(cc);
  return h;
}

double invert(const ComparisonFn& f, double y, double lo, double hi, double tol) {
  require(hi > lo, "invert: bad bracket");
  // Spot check of strict monotonicity across the bracket.
  const int probes = 9;
  double prev = f(lo);
  for (int i = 1; i <= probes; ++i) {
    double s = lo + (hi - lo) * double(i) / probes;
    double v = f(s);
    if (v <= prev)
      throw std::runtime_error("invert: samples not strictly increasing (not invertible)");
    prev = v;
  }
  double flo = f(lo), fhi = f(hi);
  if (y < flo || y > fhi)
    throw std::range_error("invert: target outside f(bracket)");
  double a = lo, b = hi;
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    if (std::abs(fm - y) <= tol) return m;
    if (fm < y)
      a = m;
    else
      b = m;
  }
  double m = 0.5 * (a + b);
  if (std::abs(f(m) - y) > tol)
    throw std::runtime_error("invert: bisection failed to meet tolerance");
  return m;
}

double invert_unbounded(const ComparisonFn& f, double y, double tol) {
  if (y <= f(0.0)) return 0.0;
  double hi = 1.0;
  for (int i = 0; i < 120 && f(std::min(hi, f.domain_max())) < y; ++i) hi *= 2.0;
  hi = std::min(hi, f.domain_max());
  if (f(hi) < y) throw std::range_error("invert_unbounded: target unreachable");
  return invert(f, y, 0.0, hi, tol);
}

double weak_triangle_bound(const ComparisonFn& gamma, const ComparisonFn& sigma,
                           double a, double b) {
  require(a >= 0.0 && b >= 0.0, "weak_triangle_bound: a, b must be nonnegative");
  const double left = gamma(a + sigma(a));
  const double sig_inv_b = b == 0.0 ? 0.0 : invert_unbounded(sigma, b);
  const double right = gamma(b + sig_inv_b);
  return std::max(left, right);
}

namespace {

struct KLTable {
  std::vector<double> levels;                 // ascending initial norms
  std::vector<double> times;                  // shared elapsed grid
  std::vector<std::vector<double>> env;       // env[level][time], cumulative in level
  double tail_rate = 0.05;
  double strict_eps = 0.0;

  double level_value(std::size_t li, double t) const {
    const auto& e = env[li];
    if (t <= times.front()) return e.front();
    if (t >= times.back())
      return e.back() * std::exp(-tail_rate * (t - times.back()));
    return pl_interp(times, e, t);
  }

  double eval(double r, double t) const {
    if (r <= 0.0) return 0.0;
    double base;
    if (r <= levels.front()) {
      base = levels.front() > 0.0 ? level_value(0, t) * (r / levels.front())
                                  : 0.0;
    } else if (r >= levels.back()) {
      base = level_value(levels.size() - 1, t) * (r / levels.back());
    } else {
      auto it = std::upper_bound(levels.begin(), levels.end(), r);
      std::size_t hi = std::size_t(it - levels.begin());
      std::size_t lo = hi - 1;
      double w = (r - levels[lo]) / (levels[hi] - levels[lo]);
      base = (1.0 - w) * level_value(lo, t) + w * level_value(hi, t);
    }
    // Strictness terms: keep r-sections strictly increasing and t-sections
    // strictly decreasing without disturbing domination (additive, positive,
    // vanishing at r = 0).
    return base + strict_eps * r * (1.0 + std::exp(-t));
  }
};

}  // namespace

KLFit fit_KL(const std::vector<KLSample>& ensemble, const FitKLOptions& opts) {
  require(!ensemble.empty(), "fit_KL: empty ensemble");
  for (const auto& s : ensemble) {
    require(s.state_norm >= 0.0 && s.initial_norm >= 0.0,
            "fit_KL: negative norms in ensemble");
    require(s.elapsed >= 0.0, "fit_KL: negative times in ensemble");
  }

  // Group samples by initial norm (exact key; norms come from shared ICs).
  std::map<double, std::vector<std::pair<double, double>>> groups;
  for (const auto& s : ensemble) {
    const double v = std::max(0.0, s.state_norm - opts.floor);
    groups[s.initial_norm].push_back({s.elapsed, v});
  }

  auto table = std::make_shared<KLTable>();
  for (auto& [r, pts] : groups) table->levels.push_back(r);

  // Shared elapsed grid: union of all sample times.
  std::vector<double> times;
  for (const auto& s : ensemble) times.push_back(s.elapsed);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  table->times = times;

  KLFit fit;
  fit.levels = table->levels;
  double peak_scale = 0.0;

  // Per-level decreasing majorant on the shared grid: at grid time t take the
  // max of the level's samples at elapsed >= t. This is the smallest
  // non-increasing function dominating the level's samples.
  for (auto& [r, pts] : groups) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> e(times.size(), 0.0);
    std::size_t pi = pts.size();
    double running = 0.0;
    std::size_t ti = times.size();
    while (ti-- > 0) {
      while (pi > 0 && pts[pi - 1].first >= times[ti]) {
        running = std::max(running, pts[pi - 1].second);
        --pi;
      }
      e[ti] = running;
    }
    table->env.push_back(std::move(e));
    peak_scale = std::max(peak_scale, table->env.back().front());
  }

  // Decay audit per level before the cumulative-max step.
  fit.decays = true;
  fit.worst_tail_ratio = 0.0;
  for (const auto& e : table->env) {
    if (e.front() <= 0.0) continue;
    const double ratio = e.back() / e.front();
    fit.worst_tail_ratio = std::max(fit.worst_tail_ratio, ratio);
    if (ratio > opts.decay_ratio) fit.decays = false;
  }

  // Cumulative max across ascending levels makes r-sections isotone.
  for (std::size_t li = 1; li < table->env.size(); ++li)
    for (std::size_t ti = 0; ti < times.size(); ++ti)
      table->env[li][ti] = std::max(table->env[li][ti], table->env[li - 1][ti]);

  // Tail continuation rate from the last observed decade, floored.
  table->tail_rate = opts.tail_rate_floor;
  if (times.size() >= 2) {
    const auto& top = table->env.back();
    const double t_mid = times[times.size() / 2], t_end = times.back();
    const double v_mid = pl_interp(times, top, t_mid), v_end = top.back();
    if (v_mid > 0.0 && v_end > 0.0 && t_end > t_mid) {
      const double rate = std::log(v_mid / v_end) / (t_end - t_mid);
      table->tail_rate = std::max(opts.tail_rate_floor, rate);
    }
  }
  table->strict_eps = 1e-12 * std::max(1.0, peak_scale);

  fit.beta = KLFn([table](double r, double t) { return table->eval(r, t); },
                  /*per_r_monotone=*/true, /*per_t_decreasing=*/fit.decays,
                  "fitted_envelope");
  fit.times = table->times;
  fit.envelope = table->env;
  fit.tail_rate = table->tail_rate;
  return fit;
}

}  // namespace isslab
