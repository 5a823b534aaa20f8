// Spatial discretization of the 1D PDE examples (heat, Kuramoto-Sivashinsky,
// reaction-diffusion, interconnected reaction-diffusion), eigenvalue
// threshold scans, grid-function inequalities (Friedrichs, Agmon) and the
// small-gain machinery for interconnections.
//
// All operators are dense n x n matrices over interior points of a uniform
// grid; eigenvalues come from the symmetric QR solver. State norms use the
// grid-weighted L2 norm sqrt(dz * sum x_i^2) so thresholds match L2(0,l)
// statements.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isslab/certify.hpp"
#include "isslab/compfun.hpp"
#include "isslab/linalg.hpp"
#include "isslab/mildsolve.hpp"
#include "isslab/timefun.hpp"

namespace isslab {

struct Grid1D {
  int n = 0;          // interior points
  double length = 1;  // domain length
  double dz = 0;      // spacing = length / (n + 1)

  Grid1D() = default;
  Grid1D(int n_pts, double len);
  double z(int i) const { return dz * double(i + 1); }  // interior coordinate
};

struct DiscretizedOperator {
  enum class Kind { DirichletLaplacian, ClampedBiharmonic, KsComposite };
  Kind kind = Kind::DirichletLaplacian;
  Mat matrix;
  std::string bc_note;
};

// dirichlet_laplacian: 3-point d^2/dz^2 with x = 0 at both ends.
// clamped_biharmonic: 5-point d^4/dz^4 with x = x' = 0 via ghost reflection.
// ks_composite(varrho): -biharmonic - varrho * laplacian, as assembled.
DiscretizedOperator assemble(DiscretizedOperator::Kind kind, const Grid1D& grid,
                             double varrho = 0.0);

// Minimum eigenvalue of d^4 + varrho d^2 (clamped) per varrho, with the
// linear-interpolated zero crossing. sigma > 0 below the threshold.
struct KsScanRow {
  double varrho;
  double min_eigenvalue;
};
struct KsScanResult {
  std::vector<KsScanRow> table;
  std::optional<double> crossing;
};
KsScanResult ks_threshold_scan(const Grid1D& grid,
                               const std::vector<double>& varrho_list);

// Heat example systems and the certify/falsify threshold over r + omega.
struct HeatScanRow {
  double r_plus_omega;
  std::string verdict;  // certified / falsified / undetermined
};
struct HeatScanResult {
  std::vector<HeatScanRow> table;
  std::optional<double> boundary;    // from the verdict flip (bisected)
  double eigen_oracle_boundary = 0;  // -max eig(nu * laplacian)
  double analytic_boundary = 0;      // nu pi^2 / l^2
};
HeatScanResult heat_threshold_scan(double nu, double ell,
                                   const std::vector<double>& r_plus_omega_list,
                                   const Grid1D& grid, double horizon,
                                   int bisect_rounds = 6);

// Grid functions carry their boundary values: size n + 2 over [0, length].
struct GridFunction {
  Grid1D grid;
  Vec values;  // size n + 2, endpoints included
};

enum class GridInequality { Friedrichs, FriedrichsOneSided, Agmon, EndpointD32 };

struct GridIneqReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;       // rhs - lhs
  double allowance = 0.0;   // O(dz^2) discretization allowance
  bool holds = false;       // slack >= -allowance
};

GridIneqReport grid_inequality(GridInequality kind, const GridFunction& x,
                               double endpoint_c = -1.0);

// Interconnection data per Assumption (H4): subsystem i couples to n+1-i.
struct InterconnectionSpec {
  std::vector<ComparisonFn> delta;  // K-infinity rates, per subsystem
  std::vector<ComparisonFn> sigma;  // cross gains (zero() allowed)
  std::vector<ComparisonFn> xi;     // input gains (zero() allowed)
  std::vector<TimeFun> ell;         // integrable residuals
  double zeta = 0.5;
};

struct SmallGainReport {
  bool condition_holds = false;
  std::optional<double> violating_s;
  // Composite gain kappa sampled on the grid, and as an evaluable function.
  std::vector<std::pair<double, double>> kappa_table;
  ComparisonFn kappa;
  ComparisonFn delta_aggregate;
  double max_defining_defect = 0.0;  // | q(zeta delta(kappa(s))) - xi(s) |
  bool residuals_decay = true;       // all ell_i decaying (CpUAG clause)
};

// Verifies (1/zeta) sigma(delta^{-1}(s)) < s on the grid and composes
// kappa = (zeta delta)^{-1} o (I - (1/zeta) sigma o delta^{-1})^{-1} o xi
// numerically via bisection inversions.
SmallGainReport smallgain_check(const InterconnectionSpec& spec,
                                const std::vector<double>& s_grid);

// The worked examples, fully wired. Nonlinearities follow the PDE forms
// verbatim; state norms are grid-weighted L2.
SemilinearSystem example_scalar_A1();
SemilinearSystem example_ks(double varrho, TimeFun mu, const Grid1D& grid);
SemilinearSystem example_heat(double nu, double ell, double r, double omega,
                              const Grid1D& grid);
SemilinearSystem example_rd_chapter3(TimeFun phi, const Grid1D& grid);
SemilinearSystem example_interconnected_rd(double c1, double c2, double length,
                                           TimeFun upsilon, const Grid1D& grid);
SemilinearSystem example_scalar_isps_ch3(const Grid1D& grid);

// The interconnection data published by the interconnected RD example.
InterconnectionSpec interconnected_rd_gains(double c1, double c2, double length);

// Name-dispatched example builder for config-driven runs:
//   scalar_A1, ks(varrho), heat(nu, ell, r, omega), rd_chapter3,
//   interconnected_rd(c1, c2, L), scalar_isps_ch3.
SemilinearSystem build_example(const std::string& name_spec, const Grid1D& grid);

}  // namespace isslab
