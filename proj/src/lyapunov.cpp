#include "isslab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace isslab {

QuadraticLyapunov::QuadraticLyapunov(GeneratorSpec gen, ExpFit fit,
                                     QuadratureOptions opts)
    : gen_(std::move(gen)),
      prop_(gen_, PropagatorOptions{opts.rk4_step, 1e-12, 1e300}),
      fit_(fit),
      opts_(opts) {
  require(fit_.w > 0.0 && fit_.k > 0.0,
          "QuadraticLyapunov: needs a certified exponential fit (k, w > 0)");
  // Tail k^2 e^{-2wT}/(2w) below tail_tol.
  window_ = std::log(fit_.k * fit_.k / (2.0 * fit_.w * opts_.tail_tol)) /
            (2.0 * fit_.w);
  window_ = std::max(window_, 1.0);
}

Mat QuadraticLyapunov::P(double t) const {
  const int n = gen_.dim();
  const int m = opts_.intervals;
  const double h = window_ / m;
  // Simpson over [t, t+window]: weights 1,4,2,...,4,1 at half-step nodes.
  Mat acc(n, n);
  Mat cur = Mat::identity(n);  // W(tau, t) at tau = t
  auto add = [&](const Mat& w, double weight) {
    Mat gram = transpose(w) * w;
    acc += (weight * h / 6.0) * gram;
  };
  for (int j = 0; j < m; ++j) {
    const double ta = t + j * h;
    add(cur, 1.0);
    Mat half = prop_.matrix(ta + 0.5 * h, ta) * cur;
    add(half, 4.0);
    cur = prop_.matrix(ta + h, ta + 0.5 * h) * half;
    add(cur, 1.0);
  }
  // Symmetrize against roundoff.
  Mat sym(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sym(i, j) = 0.5 * (acc(i, j) + acc(j, i));
  return sym;
}

double QuadraticLyapunov::V(double t, const Vec& x) const {
  require(int(x.size()) == gen_.dim(), "V: dimension mismatch");
  const int m = opts_.intervals;
  const double h = window_ / m;
  double acc = 0.0;
  Vec cur = x;
  for (int j = 0; j < m; ++j) {
    const double ta = t + j * h;
    const double fa = dot(cur, cur);
    Vec half = prop_.apply(ta + 0.5 * h, ta, cur);
    const double fm = dot(half, half);
    cur = prop_.apply(ta + h, ta + 0.5 * h, half);
    const double fb = dot(cur, cur);
    acc += (h / 6.0) * (fa + 4.0 * fm + fb);
  }
  return acc;
}

double QuadraticLyapunov::lyapunov_residual(double t, double h) const {
  require(h > 0.0 && t - h >= 0.0, "lyapunov_residual: need t - h >= 0");
  const int n = gen_.dim();
  Mat p = P(t);
  Mat pp = P(t + h);
  Mat pm = P(t - h);
  Mat pdot = (1.0 / (2.0 * h)) * (pp - pm);
  Mat a = gen_.matrix_at(t);
  Mat res = transpose(a) * p + p * a + pdot + Mat::identity(n);
  return frobenius_norm(res);
}

LyapunovFn make_noncoercive_V(std::shared_ptr<QuadraticLyapunov> engine) {
  LyapunovFn f;
  f.kind = LyapunovFn::Kind::NoncoerciveIntegral;
  f.eval = [engine](double t, const Vec& x) { return engine->V(t, x); };
  f.label = "V_noncoercive";
  return f;
}

LyapunovFn make_log_iiss_Z(std::shared_ptr<QuadraticLyapunov> engine) {
  LyapunovFn f;
  f.kind = LyapunovFn::Kind::LogIiss;
  f.eval = [engine](double t, const Vec& x) {
    return std::log1p(engine->V(t, x));
  };
  f.label = "Z_log_iiss";
  return f;
}

DiniEstimate dini_derivative(const LyapunovFn& V, const SemilinearSystem& sys,
                             double t, const Vec& x, const InputSignal& u,
                             std::vector<double> h_seq) {
  require(!h_seq.empty(), "dini_derivative: need at least one h");
  std::sort(h_seq.begin(), h_seq.end(), std::greater<double>());
  DiniEstimate est;
  est.h_seq = h_seq;
  const double v0 = V(t, x);
  for (double h : h_seq) {
    SolveOptions opts;
    opts.step = h / 16.0;
    opts.max_nodes = 4;
    Trajectory traj = solve_mild(sys, t, x, u, t + h, opts);
    if (!traj.complete())
      throw std::runtime_error("dini_derivative: trajectory failed within h");
    const double vh = V(t + h, traj.terminal());
    est.quotients.push_back((vh - v0) / h);
  }
  if (est.quotients.size() == 1) {
    est.value = est.quotients.front();
  } else {
    // Two-point Richardson on the two smallest steps: error ~ c h.
    const std::size_t k = est.quotients.size();
    const double h1 = h_seq[k - 2], h2 = h_seq[k - 1];
    const double d1 = est.quotients[k - 2], d2 = est.quotients[k - 1];
    est.value = (h1 * d2 - h2 * d1) / (h1 - h2);
  }
  return est;
}

namespace {

struct FormEval {
  double lhs = 0.0;
  double rhs = 0.0;
  bool gated_out = false;
};

FormEval eval_form(DissipationForm form, const DissipationParams& prm,
                   double dini, double vval, double xnorm, double unorm,
                   double t) {
  FormEval fe;
  fe.lhs = dini;
  switch (form) {
    case DissipationForm::Implication: {
      require(prm.kappa && prm.mu_of_V, "implication form needs kappa and mu");
      if (xnorm < (*prm.kappa)(unorm)) {
        fe.gated_out = true;
        break;
      }
      fe.rhs = -(*prm.mu_of_V)(vval);
      break;
    }
    case DissipationForm::Dissipative: {
      require(prm.eta_of_state && prm.chi_of_input,
              "dissipative form needs eta and chi");
      fe.rhs = -(*prm.eta_of_state)(xnorm) + (*prm.chi_of_input)(unorm);
      break;
    }
    case DissipationForm::LinearBound: {
      const double k2 = prm.k * prm.k;
      fe.rhs = -xnorm * xnorm + prm.eta * k2 / (2.0 * prm.w) * xnorm * xnorm +
               k2 / (2.0 * prm.eta * prm.w) * prm.b_inf * prm.b_inf * unorm * unorm;
      break;
    }
    case DissipationForm::IspsKlRate: {
      require(prm.kappa && prm.delta_of_V && prm.ell,
              "ISpS KL-rate form needs kappa, delta, ell");
      if (vval < (*prm.kappa)(unorm)) {
        fe.gated_out = true;
        break;
      }
      fe.rhs = -(*prm.delta_of_V)(vval) + (*prm.ell)(t);
      break;
    }
    case DissipationForm::IspsIndefinite: {
      require(prm.kappa && prm.nu && prm.psi,
              "ISpS indefinite form needs kappa, nu, psi");
      if (vval < (*prm.kappa)(unorm)) {
        fe.gated_out = true;
        break;
      }
      fe.rhs = (*prm.nu)(t)*vval + (*prm.psi)(t);
      break;
    }
  }
  return fe;
}

}  // namespace

DissipationReport check_dissipation(const LyapunovFn& V,
                                    const SemilinearSystem& sys,
                                    const std::vector<ControlSample>& ensemble,
                                    double horizon, DissipationForm form,
                                    const DissipationParams& params,
                                    const SolveOptions& solve_opts) {
  DissipationReport rep;
  for (const auto& smp : ensemble) {
    Trajectory traj = solve_mild(sys, smp.t0, smp.x0, smp.u, horizon, solve_opts);
    if (!traj.complete()) continue;
    const std::size_t n_nodes = traj.nodes.size();
    const std::size_t stride =
        std::max<std::size_t>(1, n_nodes / std::size_t(params.samples_per_trajectory));
    // Skip the final node: forward Dini quotients need room ahead, and the
    // largest h must stay inside the horizon.
    const double h_margin = params.h_seq.front();
    for (std::size_t i = 0; i < n_nodes; i += stride) {
      const auto& node = traj.nodes[i];
      if (node.t + h_margin > horizon) break;
      const Vec& x = node.x;
      const double xnorm = sys.state_norm(x);
      const double unorm = sys.input_value_norm(smp.u.value(node.t));
      const double vval = V(node.t, x);
      DiniEstimate dini = dini_derivative(V, sys, node.t, x, smp.u, params.h_seq);

      FormEval fe = eval_form(form, params, dini.value, vval, xnorm, unorm, node.t);
      DissipationSampleRow row;
      row.t = node.t;
      row.state_norm = xnorm;
      row.input_norm = unorm;
      row.gated_out = fe.gated_out;
      ++rep.samples;
      if (!fe.gated_out) {
        const double tol = params.tol * (1.0 + xnorm * xnorm);
        row.lhs = fe.lhs;
        row.rhs = fe.rhs;
        row.slack = fe.rhs - fe.lhs + tol;
        if (row.slack < 0.0) {
          ++rep.raw_violations;
          // Re-test under h-refinement: estimator noise shrinks, real
          // violations persist.
          DiniEstimate fine =
              dini_derivative(V, sys, node.t, x, smp.u, params.h_seq_refined);
          FormEval fe2 =
              eval_form(form, params, fine.value, vval, xnorm, unorm, node.t);
          const double slack2 = fe2.rhs - fe2.lhs + tol;
          row.refined_ok = slack2 >= 0.0;
          if (!row.refined_ok) {
            row.violated = true;
            ++rep.violations;
          }
        }
        if (!rep.worst || row.slack < rep.worst->slack) rep.worst = row;
      }
      rep.rows.push_back(row);
    }
  }
  rep.violation_fraction =
      rep.samples == 0 ? 0.0 : double(rep.violations) / double(rep.samples);
  return rep;
}

void write_dissipation_csv(const std::string& path, const DissipationReport& rep) {
  std::ofstream out(path);
  require(bool(out), "write_dissipation_csv: cannot open " + path);
  out << "time,state_norm,input_norm,lhs,rhs,slack\n";
  out.precision(17);
  for (const auto& r : rep.rows) {
    if (r.gated_out) continue;
    out << r.t << "," << r.state_norm << "," << r.input_norm << "," << r.lhs
        << "," << r.rhs << "," << r.slack << "\n";
  }
}

}  // namespace isslab
