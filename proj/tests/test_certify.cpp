#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isslab/certify.hpp"

using namespace isslab;

namespace {

EnsembleSpec small_spec(int state_dim, int input_dim, double horizon) {
  EnsembleSpec spec = EnsembleSpec::defaults(state_dim, input_dim, horizon);
  // Trim for unit-test speed: 5 ICs, 4 inputs, 3 start times.
  spec.initial_conditions.resize(5);
  spec.inputs.resize(4);
  spec.t0_list = {0.0, 1.0, 2.0};
  return spec;
}

}  // namespace

TEST_CASE("ISS certified for dx = -x + u with gain slope near 1") {
  auto sys = SemilinearSystem::linear_scalar(-1.0, 1.0);
  auto spec = small_spec(1, 1, 15.0);
  auto cert = certify(sys, spec, StabilityProperty::ISS);
  REQUIRE(cert.certified);
  // Fitted gain: the analytic gain is 1; the fitted envelope stays below
  // slope 1.1.
  for (const auto& [g, v] : cert.gamma_table) {
    CHECK(v <= 1.1 * g + cert.offset_r + 1e-6);
  }
  CHECK(cert.offset_r == 0.0);
}

TEST_CASE("0-UGAS certified for dx = -x with exponential-like envelope") {
  auto sys = SemilinearSystem::linear_scalar(-1.0, 0.0);
  auto spec = small_spec(1, 1, 12.0);
  auto cert = certify(sys, spec, StabilityProperty::UGAS0);
  REQUIRE(cert.certified);
  // beta(1, 3) close to e^{-3} times a modest constant.
  const double b = cert.beta_fit.beta(1.0, 3.0);
  CHECK(b >= std::exp(-3.0) * 0.9);
  CHECK(b <= std::exp(-3.0) * 2.0);
}

TEST_CASE("unstable scalar is falsified everywhere") {
  auto sys = SemilinearSystem::linear_scalar(0.4, 1.0);
  auto spec = small_spec(1, 1, 12.0);
  for (auto p : {StabilityProperty::ISS, StabilityProperty::UGAS0,
                 StabilityProperty::iISS}) {
    auto cert = certify(sys, spec, p);
    CHECK_FALSE(cert.certified);
    REQUIRE(cert.witness.has_value());
  }
  auto w = falsify(sys, {.budget = 40, .horizon = 12.0});
  CHECK(w.has_value());
}

TEST_CASE("window-growth scalar example: 0-UGAS falsified by start-time holdout") {
  SemilinearSystem sys;
  sys.gen = GeneratorSpec::example_A1();
  sys.label = "example_A1";
  EnsembleSpec spec;
  spec.horizon = 16.0;
  spec.initial_conditions = {{0.5}, {1.0}, {2.0}};
  spec.inputs = {InputSignal::zero(1)};
  // Early and late start times, including window peaks at k + 1/2.
  spec.t0_list = {0.0, 0.5, 1.5, 6.5, 8.5};
  auto cert = certify(sys, spec, StabilityProperty::UGAS0);
  CHECK_FALSE(cert.certified);
  REQUIRE(cert.witness.has_value());
  CHECK(cert.witness->reason.find("uniformity") != std::string::npos);
}

TEST_CASE("eISS: exponential envelope fitted for a stable LTV system") {
  Mat base(2, 2);
  base(0, 0) = -1.0;
  base(1, 1) = -1.5;
  Mat off(2, 2);
  off(0, 1) = 1.0;
  off(1, 0) = -1.0;
  SemilinearSystem sys =
      SemilinearSystem::linear(GeneratorSpec::sinusoidal_perturbation(base, off, 0.2, 1.0),
                               Mat::identity(2));
  sys.input_dim = 2;
  auto spec = small_spec(2, 2, 12.0);
  auto cert = certify(sys, spec, StabilityProperty::eISS);
  REQUIRE(cert.certified);
  REQUIRE(cert.exp_beta.has_value());
  CHECK(cert.exp_beta->second > 0.3);  // decay rate near 1
  CHECK(cert.exp_beta->first >= 1.0);
}

TEST_CASE("iISS gain argument uses the input integral") {
  auto sys = SemilinearSystem::linear_scalar(-1.0, 1.0);
  auto spec = small_spec(1, 1, 10.0);
  CertifyOptions opts;
  opts.mu_catalog = "identity";
  auto cert = certify(sys, spec, StabilityProperty::iISS, opts);
  REQUIRE(cert.certified);
  CHECK(cert.integral_gain_mu == "identity");
  // Gain args extend to the integral scale (~ horizon * sup u).
  REQUIRE(!cert.gamma_table.empty());
  CHECK(cert.gamma_table.back().first > 3.0);
}

TEST_CASE("ISpS: practical offset absorbs a constant drift") {
  // dx = -x + u + 0.3: not ISS to zero, but ISpS with offset ~0.3.
  SemilinearSystem sys = SemilinearSystem::linear_scalar(-1.0, 1.0);
  sys.nonlinearity = [](double, const Vec&, const Vec&) { return Vec{0.3}; };
  auto spec = small_spec(1, 1, 15.0);
  auto iss = certify(sys, spec, StabilityProperty::ISS);
  CHECK_FALSE(iss.certified);
  auto isps = certify(sys, spec, StabilityProperty::ISpS);
  REQUIRE(isps.certified);
  CHECK(isps.offset_r > 0.05);
  CHECK(isps.offset_r < 0.8);
}

TEST_CASE("CpUAG with shift and derived ISpS certificate") {
  // Decaying forcing e^{-t} drives even x0 = 0 away from zero: CpUAG's c
  // covers the transient, the derived ISpS re-verifies.
  SemilinearSystem sys = SemilinearSystem::linear_scalar(-1.0, 1.0);
  sys.nonlinearity = [](double t, const Vec&, const Vec&) {
    return Vec{std::exp(-t)};
  };
  EnsembleSpec spec = small_spec(1, 1, 15.0);
  spec.initial_conditions.push_back({0.0});  // zero initial state
  auto res = certify_CpUAG(sys, spec);
  REQUIRE(res.cpuag.certified);
  CHECK(res.cpuag.cpuag_c > 0.0);
  REQUIRE(res.derived_isps.certified);
  CHECK(res.derived_isps.offset_r >=
        res.cpuag.cpuag_sigma - 1e-12);  // offset beta(2c,0)+sigma
}

TEST_CASE("CpUAG with c = 0 and sigma = 0 reduces to the plain envelope") {
  auto sys = SemilinearSystem::linear_scalar(-1.0, 1.0);
  auto spec = small_spec(1, 1, 12.0);
  auto res = certify_CpUAG(sys, spec);
  REQUIRE(res.cpuag.certified);
  CHECK(res.cpuag.cpuag_c == 0.0);
  CHECK(res.cpuag.cpuag_sigma <= 1e-2);  // finite-horizon floor, ~exp(-horizon)
}

TEST_CASE("falsify: stable system yields no witness") {
  auto sys = SemilinearSystem::linear_scalar(-1.0, 1.0);
  auto w = falsify(sys, {.budget = 30, .horizon = 10.0});
  CHECK_FALSE(w.has_value());
}

TEST_CASE("cross-equivalence audit agrees on stable and unstable systems") {
  auto stable = SemilinearSystem::linear_scalar(-1.0, 1.0);
  auto spec = small_spec(1, 1, 12.0);
  auto a1 = cross_equivalence_audit(stable, spec);
  CHECK(a1.agree);
  CHECK(a1.iss);

  auto unstable = SemilinearSystem::linear_scalar(0.5, 1.0);
  auto a2 = cross_equivalence_audit(unstable, spec);
  CHECK(a2.agree);
  CHECK_FALSE(a2.iss);
}

TEST_CASE("certificates are deterministic and serializable") {
  auto sys = SemilinearSystem::linear_scalar(-1.0, 1.0);
  auto spec = small_spec(1, 1, 10.0);
  auto c1 = certify(sys, spec, StabilityProperty::ISS);
  auto c2 = certify(sys, spec, StabilityProperty::ISS);
  const std::string t1 = certificate_to_text(c1);
  const std::string t2 = certificate_to_text(c2);
  CHECK(t1 == t2);  // bitwise reproducible
  CHECK(t1.find("property: ISS") != std::string::npos);
  CHECK(t1.find("certified_on_grid") != std::string::npos);
  CHECK(t1.find("slack_csv") != std::string::npos);
}

TEST_CASE("causality reduction: freezing the input after t leaves gains intact") {
  // Certificates computed with sup over [t0, t] match the full-horizon sup
  // for inputs frozen after the window (the running sup never sees beyond).
  auto sys = SemilinearSystem::linear_scalar(-1.0, 1.0);
  EnsembleSpec spec = small_spec(1, 1, 10.0);
  // Replace the step input (which jumps at horizon/4) with a frozen variant
  // that keeps its value after the jump: identical running sup by t.
  auto c1 = certify(sys, spec, StabilityProperty::ISS);
  REQUIRE(c1.certified);
  // Sanity check of the running-sup mechanism via the slack table: gain
  // arguments are nondecreasing along each trajectory.
  double prev_gain = -1.0;
  double prev_t0 = -1.0, prev_x0 = -1.0, prev_elapsed = 1e300;
  for (const auto& row : c1.slack_table) {
    const bool same_traj = row.t0 == prev_t0 && row.x0_norm == prev_x0 &&
                           row.elapsed > prev_elapsed;
    if (same_traj) CHECK(row.gain_arg >= prev_gain - 1e-15);
    prev_gain = row.gain_arg;
    prev_t0 = row.t0;
    prev_x0 = row.x0_norm;
    prev_elapsed = row.elapsed;
  }
}

TEST_CASE("enlarging the ensemble never flips falsified to certified") {
  // The window-growth scalar example is falsified on a t0 grid; adding more start
  // times keeps it falsified.
  SemilinearSystem sys;
  sys.gen = GeneratorSpec::example_A1();
  EnsembleSpec spec;
  spec.horizon = 16.0;
  spec.initial_conditions = {{1.0}};
  spec.inputs = {InputSignal::zero(1)};
  spec.t0_list = {0.0, 0.5, 1.5, 6.5, 8.5};
  auto c1 = certify(sys, spec, StabilityProperty::UGAS0);
  CHECK_FALSE(c1.certified);
  spec.t0_list.push_back(9.5);
  spec.initial_conditions.push_back({0.3});
  auto c2 = certify(sys, spec, StabilityProperty::UGAS0);
  CHECK_FALSE(c2.certified);
}

TEST_CASE("LISS records the certified ball radii") {
  // Globally ISS system restricted to a ball: LISS certifies and the radii
  // (largest grid radii at which certification succeeded) land in the notes.
  auto sys = SemilinearSystem::linear_scalar(-1.0, 1.0);
  auto spec = small_spec(1, 1, 12.0);
  auto cert = certify(sys, spec, StabilityProperty::LISS);
  REQUIRE(cert.certified);
  CHECK(cert.notes.find("rho_x=") != std::string::npos);
  CHECK(cert.notes.find("rho_u=") != std::string::npos);
}

TEST_CASE("0-UGpAS tolerates a decaying zero-input floor") {
  // dx = -x + 0.2 e^{-0.05 t}: zero-input trajectories settle on a slowly
  // decaying floor; practical stability certifies with a positive offset.
  SemilinearSystem sys = SemilinearSystem::linear_scalar(-1.0, 0.0);
  sys.nonlinearity = [](double t, const Vec&, const Vec&) {
    return Vec{0.2 * std::exp(-0.05 * t)};
  };
  auto spec = small_spec(1, 1, 20.0);
  auto cert = certify(sys, spec, StabilityProperty::UGpAS0);
  REQUIRE(cert.certified);
  CHECK(cert.offset_r > 0.0);
  CHECK(cert.gamma_table.empty());  // zero-input property carries no gain
}

TEST_CASE("eISpS fits an exponential envelope with a practical offset") {
  SemilinearSystem sys = SemilinearSystem::linear_scalar(-1.0, 1.0);
  sys.nonlinearity = [](double, const Vec&, const Vec&) { return Vec{0.25}; };
  auto spec = small_spec(1, 1, 15.0);
  auto cert = certify(sys, spec, StabilityProperty::eISpS);
  REQUIRE(cert.certified);
  REQUIRE(cert.exp_beta.has_value());
  CHECK(cert.exp_beta->second > 0.3);
  CHECK(cert.offset_r > 0.05);
}

TEST_CASE("Lp-ISpS uses the L_p input norm as the gain argument") {
  auto sys = SemilinearSystem::linear_scalar(-1.0, 1.0);
  auto spec = small_spec(1, 1, 10.0);
  CertifyOptions opts;
  opts.lp_exponent = 2.0;
  auto cert = certify(sys, spec, StabilityProperty::LpISpS, opts);
  REQUIRE(cert.certified);
  CHECK(cert.lp_exponent == 2.0);
  // The gain argument for the constant-1 input approaches sqrt(horizon).
  REQUIRE(!cert.gamma_table.empty());
  CHECK(cert.gamma_table.back().first > 2.0);
}

TEST_CASE("certificate header parses back and replay is byte-stable") {
  auto sys = SemilinearSystem::linear_scalar(-1.0, 1.0);
  auto spec = small_spec(1, 1, 10.0);
  auto cert = certify(sys, spec, StabilityProperty::ISS);
  const std::string text = certificate_to_text(cert);
  auto header = certificate_parse_header(text);
  CHECK(header.property == "ISS");
  CHECK(header.certified);
  CHECK(header.ensemble_digest == spec.digest_text());
  CHECK(header.slack_rows == cert.slack_table.size());
  // Replaying the ensemble reproduces the serialized certificate.
  auto replay = certify(sys, spec, StabilityProperty::ISS);
  CHECK(certificate_to_text(replay) == text);
}
