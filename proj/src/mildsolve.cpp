#include "isslab/mildsolve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "isslab/rng.hpp"

namespace isslab {

InputSignal::InputSignal(std::vector<Piece> pieces, int dim, std::string label)
    : pieces_(std::move(pieces)), dim_(dim), label_(std::move(label)) {
  require(!pieces_.empty(), "InputSignal: need at least one piece");
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    require(pieces_[i].start > pieces_[i - 1].start,
            "InputSignal: piece starts must increase");
    discontinuities_.push_back(pieces_[i].start);
  }
}

InputSignal InputSignal::zero(int dim) {
  Vec z(dim, 0.0);
  std::vector<Piece> p{{0.0, [z](double) { return z; }}};
  InputSignal u(std::move(p), dim, "zero");
  return u;
}

InputSignal InputSignal::constant(Vec value) {
  const int dim = int(value.size());
  std::vector<Piece> p{{0.0, [value](double) { return value; }}};
  return InputSignal(std::move(p), dim, "constant_vec");
}

InputSignal InputSignal::constant(double value, const Vec& profile) {
  Vec v = scale(value, profile);
  const int dim = int(profile.size());
  std::vector<Piece> p{{0.0, [v](double) { return v; }}};
  return InputSignal(std::move(p), dim, "constant(" + std::to_string(value) + ")");
}

InputSignal InputSignal::step(double t_jump, double before, double after,
                              const Vec& profile) {
  require(t_jump > 0.0, "InputSignal::step: jump time must be positive");
  Vec vb = scale(before, profile), va = scale(after, profile);
  std::vector<Piece> p{{0.0, [vb](double) { return vb; }},
                       {t_jump, [va](double) { return va; }}};
  return InputSignal(std::move(p), int(profile.size()), "step");
}

InputSignal InputSignal::sine(double amplitude, double freq, double phase,
                              const Vec& profile) {
  std::vector<Piece> p{{0.0, [=](double t) {
                          return scale(amplitude * std::sin(freq * t + phase),
                                       profile);
                        }}};
  return InputSignal(std::move(p), int(profile.size()), "sine");
}

InputSignal InputSignal::sampled(std::vector<double> times, std::vector<Vec> values) {
  require(!times.empty() && times.size() == values.size(),
          "InputSignal::sampled: need matching non-empty arrays");
  const int dim = int(values.front().size());
  auto ts = std::make_shared<std::vector<double>>(std::move(times));
  auto vs = std::make_shared<std::vector<Vec>>(std::move(values));
  std::vector<Piece> p{{0.0, [ts, vs, dim](double t) {
                          const auto& x = *ts;
                          if (t <= x.front()) return (*vs).front();
                          if (t >= x.back()) return (*vs).back();
                          auto it = std::upper_bound(x.begin(), x.end(), t);
                          std::size_t hi = std::size_t(it - x.begin());
                          std::size_t lo = hi - 1;
                          const double w = (t - x[lo]) / (x[hi] - x[lo]);
                          Vec out(dim);
                          for (int i = 0; i < dim; ++i)
                            out[i] = (*vs)[lo][i] + w * ((*vs)[hi][i] - (*vs)[lo][i]);
                          return out;
                        }}};
  return InputSignal(std::move(p), dim, "sampled");
}

Vec InputSignal::value(double t) const {
  // Right-continuous: the active piece is the last with start <= t.
  std::size_t idx = 0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (pieces_[i].start <= t) idx = i;
    else break;
  }
  return pieces_[idx].eval(t);
}

double InputSignal::sup_norm(double horizon,
                             const std::function<double(const Vec&)>& value_norm,
                             int grid_points) const {
  double sup = 0.0;
  for (int i = 0; i <= grid_points; ++i) {
    const double t = horizon * double(i) / grid_points;
    sup = std::max(sup, value_norm(value(t)));
  }
  // Also probe just after each discontinuity (right limits).
  for (double d : discontinuities_) {
    if (d >= 0.0 && d <= horizon) sup = std::max(sup, value_norm(value(d)));
  }
  return sup;
}

SemilinearSystem SemilinearSystem::linear(GeneratorSpec g, Mat b) {
  SemilinearSystem s;
  s.input_dim = int(b.cols());
  auto bm = std::make_shared<Mat>(std::move(b));
  s.gen = std::move(g);
  s.input_op = [bm](double) { return *bm; };
  s.label = "linear";
  return s;
}

SemilinearSystem SemilinearSystem::linear_scalar(double a, double b) {
  Mat bm(1, 1);
  bm(0, 0) = b;
  SemilinearSystem s = linear(GeneratorSpec::scalar_piecewise({{0.0, a}}), bm);
  s.label = "linear_scalar";
  return s;
}

namespace {

// Effective forcing B(t) u + Psi(t, x, u).
Vec effective_forcing(const SemilinearSystem& sys, double t, const Vec& x,
                      const Vec& u) {
  Vec f(x.size(), 0.0);
  if (sys.input_op) {
    Mat b = (*sys.input_op)(t);
    f = b * u;
  }
  if (sys.nonlinearity) {
    Vec p = (*sys.nonlinearity)(t, x, u);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += p[i];
  }
  return f;
}

bool finite(const Vec& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

// Chunk boundaries: t0, each input discontinuity in (t0, horizon), horizon.
std::vector<double> chunk_bounds(double t0, double horizon,
                                 const std::vector<double>& discs) {
  std::vector<double> b{t0};
  for (double d : discs)
    if (d > t0 + 1e-15 && d < horizon - 1e-15) b.push_back(d);
  b.push_back(horizon);
  return b;
}

}  // namespace

Trajectory solve_mild(const SemilinearSystem& sys, double t0, const Vec& x0,
                      const InputSignal& u, double horizon,
                      const SolveOptions& opts) {
  require(int(x0.size()) == sys.dim(), "solve_mild: state dimension mismatch");
  require(horizon > t0, "solve_mild: horizon must exceed t0");
  require(u.dim() == sys.input_dim || (!sys.input_op && !sys.nonlinearity),
          "solve_mild: input dimension mismatch");

  Propagator w(sys.gen);
  Trajectory traj;
  traj.input_label = u.label();
  traj.input_sup = u.sup_norm(horizon, [&](const Vec& v) {
    return sys.input_value_norm(v);
  });

  const bool pure_linear_free = !sys.input_op && !sys.nonlinearity;

  // Node budget: total steps determine the keep-stride.
  const double total_span = horizon - t0;
  const std::size_t approx_steps = std::size_t(std::ceil(total_span / opts.step));
  const std::size_t stride =
      std::max<std::size_t>(1, approx_steps / std::max<std::size_t>(1, opts.max_nodes));

  Vec x = x0;
  double t = t0;
  traj.nodes.push_back({t, x});
  std::size_t step_count = 0;

  // Fixed step with a shortened final step per chunk: runs that share a
  // prefix of the input see bitwise-identical node sequences there, which
  // makes the causality and cocycle audits exact.
  const auto bounds = chunk_bounds(t0, horizon, u.discontinuities());
  for (std::size_t c = 0; c + 1 < bounds.size(); ++c) {
    const double a = bounds[c], b = bounds[c + 1];
    // Step times are computed as a + k*step (no accumulation), so runs that
    // share an input prefix see bitwise-identical node sequences there. The
    // final step lands exactly on b and absorbs any sub-min_step sliver.
    long long steps = std::max(1LL, (long long)std::ceil((b - a) / opts.step - 1e-9));
    if (steps > 1 && b - (a + double(steps - 1) * opts.step) < opts.min_step)
      --steps;
    if ((b - a) / double(steps) < opts.min_step) {
      traj.status = Trajectory::Status::StepFailure;
      traj.t_max = t;
      return traj;
    }
    for (long long k = 0; k < steps; ++k) {
      const double tk = a + double(k) * opts.step;
      const double tn = (k + 1 == steps) ? b : a + double(k + 1) * opts.step;
      const double h = tn - tk;
      const double tm = tk + 0.5 * h;
      if (pure_linear_free) {
        x = w.apply(tn, tk, x);
      } else {
        // Half-step predictor, then midpoint quadrature of the forcing.
        const Vec uk = u.value(tk);
        Vec f0 = effective_forcing(sys, tk, x, uk);
        Vec xm = w.apply(tm, tk, x);
        xm = axpy(0.5 * h, f0, xm);
        const Vec um = u.value(tm);
        Vec fm = effective_forcing(sys, tm, xm, um);
        Vec xn = w.apply(tn, tk, x);
        Vec push = w.apply(tn, tm, fm);
        x = axpy(h, push, xn);
      }
      t = tn;
      ++step_count;
      const double nx = sys.state_norm(x);
      if (!finite(x) || nx > opts.blowup_threshold) {
        traj.status = Trajectory::Status::BlowUp;
        traj.t_max = t;
        traj.nodes.push_back({t, x});
        return traj;
      }
      if (step_count % stride == 0 || t == b) traj.nodes.push_back({t, x});
    }
  }
  if (traj.nodes.back().t != t) traj.nodes.push_back({t, x});
  traj.t_max = t;
  return traj;
}

Trajectory solve_rk4(const SemilinearSystem& sys, double t0, const Vec& x0,
                     const InputSignal& u, double horizon, double step) {
  require(int(x0.size()) == sys.dim(), "solve_rk4: state dimension mismatch");
  auto rhs = [&](double t, const Vec& x) {
    Vec f = sys.gen.apply(t, x);
    Vec g = effective_forcing(sys, t, x, u.value(t));
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += g[i];
    return f;
  };
  Trajectory traj;
  traj.input_label = u.label();
  Vec x = x0;
  double t = t0;
  traj.nodes.push_back({t, x});
  const auto bounds = chunk_bounds(t0, horizon, u.discontinuities());
  for (std::size_t c = 0; c + 1 < bounds.size(); ++c) {
    const double a = bounds[c], b = bounds[c + 1];
    long long steps = std::max(1LL, (long long)std::ceil((b - a) / step - 1e-9));
    for (long long k = 0; k < steps; ++k) {
      const double tk = a + double(k) * step;
      const double tn = (k + 1 == steps) ? b : a + double(k + 1) * step;
      const double h = tn - tk;
      Vec k1 = rhs(tk, x);
      Vec k2 = rhs(tk + 0.5 * h, axpy(0.5 * h, k1, x));
      Vec k3 = rhs(tk + 0.5 * h, axpy(0.5 * h, k2, x));
      Vec k4 = rhs(tn, axpy(h, k3, x));
      for (std::size_t i = 0; i < x.size(); ++i)
        x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      t = tn;
      traj.nodes.push_back({t, x});
      if (!finite(x) || sys.state_norm(x) > 1e12) {
        traj.status = Trajectory::Status::BlowUp;
        traj.t_max = t;
        return traj;
      }
    }
  }
  traj.t_max = t;
  return traj;
}

ControlAxiomReport check_control_axioms(const SemilinearSystem& sys,
                                        const std::vector<ControlSample>& samples,
                                        double horizon, double tol,
                                        const SolveOptions& opts) {
  require(!samples.empty(), "check_control_axioms: need samples");
  ControlAxiomReport rep;
  SolveOptions dense = opts;
  dense.max_nodes = std::size_t(-1);  // record every step node
  for (const auto& smp : samples) {
    Trajectory base = solve_mild(sys, smp.t0, smp.x0, smp.u, horizon, dense);
    if (!base.complete()) continue;

    // Sigma_1: identity at the initial time, exactly.
    const auto& first = base.nodes.front();
    if (first.t != smp.t0 || norm2(axpy(-1.0, smp.x0, first.x)) != 0.0) {
      rep.identity_ok = false;
      rep.detail += "identity violated; ";
    }

    // Sigma_3: continuity modulus between adjacent nodes.
    for (std::size_t i = 1; i < base.nodes.size(); ++i) {
      const double jump =
          sys.state_norm(axpy(-1.0, base.nodes[i - 1].x, base.nodes[i].x));
      rep.continuity_modulus = std::max(rep.continuity_modulus, jump);
    }

    // Sigma_2: mutate the input strictly after a cut node; nodes up to the
    // cut must match bitwise (the integrator never reads future input).
    const std::size_t cut = base.nodes.size() / 2;
    const double t_cut = base.nodes[cut].t;
    {
      // Keep the original piece structure below the cut so both runs chunk
      // identically there, then overwrite everything from t_cut on.
      std::vector<InputSignal::Piece> pieces;
      for (const auto& p : smp.u.pieces())
        if (p.start < t_cut) pieces.push_back(p);
      Vec big(std::size_t(sys.input_dim), 37.5);
      pieces.push_back({t_cut, [big](double) { return big; }});
      InputSignal mutated(std::move(pieces), sys.input_dim, "mutated");
      Trajectory alt = solve_mild(sys, smp.t0, smp.x0, mutated, horizon, dense);
      bool same = alt.nodes.size() >= cut + 1;
      for (std::size_t i = 0; same && i <= cut; ++i) {
        same = alt.nodes[i].t == base.nodes[i].t;
        for (std::size_t j = 0; same && j < alt.nodes[i].x.size(); ++j)
          same = alt.nodes[i].x[j] == base.nodes[i].x[j];
      }
      if (!same) {
        rep.causality_ok = false;
        rep.detail += "causality violated at t_cut=" + std::to_string(t_cut) + "; ";
      }
    }

    // Sigma_4: cocycle through an intermediate node; the restart runs on the
    // same step grid, so the residual is the scheme's roundoff.
    {
      Trajectory tail =
          solve_mild(sys, t_cut, base.nodes[cut].x, smp.u, horizon, dense);
      const Vec& direct = base.terminal();
      const Vec& via = tail.terminal();
      const double res =
          sys.state_norm(axpy(-1.0, direct, via)) / (1.0 + sys.state_norm(direct));
      rep.max_cocycle_residual = std::max(rep.max_cocycle_residual, res);
      if (res > tol) {
        rep.cocycle_ok = false;
        rep.detail += "cocycle residual " + std::to_string(res) + "; ";
      }
    }
  }
  return rep;
}

double lipschitz_probe(const SemilinearSystem& sys, double state_radius,
                       double input_radius, double t_lo, double t_hi,
                       int samples, std::uint64_t seed) {
  require(sys.nonlinearity.has_value(), "lipschitz_probe: no nonlinearity present");
  SplitMix64 rng(seed);
  const int n = sys.dim();
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = rng.uniform(t_lo, t_hi);
    Vec x(n), y(n), u(std::size_t(sys.input_dim));
    for (int i = 0; i < n; ++i) {
      x[i] = rng.uniform(-state_radius, state_radius);
      y[i] = rng.uniform(-state_radius, state_radius);
    }
    for (int i = 0; i < sys.input_dim; ++i)
      u[i] = rng.uniform(-input_radius, input_radius);
    const double dxy = norm2(axpy(-1.0, x, y));
    if (dxy < 1e-12) continue;
    Vec px = (*sys.nonlinearity)(t, x, u);
    Vec py = (*sys.nonlinearity)(t, y, u);
    if (!finite(px) || !finite(py))
      throw std::invalid_argument("lipschitz_probe: nonlinearity returned non-finite value");
    worst = std::max(worst, norm2(axpy(-1.0, px, py)) / dxy);
  }
  return worst;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const SemilinearSystem& sys, const InputSignal& u) {
  std::ofstream out(path);
  require(bool(out), "write_trajectory_csv: cannot open " + path);
  out << "time";
  for (int i = 1; i <= sys.dim(); ++i) out << ",x_" << i;
  out << ",input_norm\n";
  out.precision(17);
  for (const auto& node : traj.nodes) {
    out << node.t;
    for (double v : node.x) out << "," << v;
    out << "," << sys.input_value_norm(u.value(node.t)) << "\n";
  }
}

}  // namespace isslab
