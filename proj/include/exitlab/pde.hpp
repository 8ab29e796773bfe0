#pragma once

#include <optional>
#include <vector>

#include "exitlab/geometry.hpp"
#include "exitlab/grid_heat.hpp"
#include "exitlab/radial_heat.hpp"

namespace exitlab::pde {

// Killed heat solve for a Brownian start at x0. Dispatches to the radial
// engine when the problem is rotation invariant about x0 (centered balls),
// otherwise to the masked planar grid. Unbounded domains need a truncation
// radius; the mass absorbed at the truncation sphere is tracked separately
// so it can be reported as an error budget rather than silently folded in.
struct SolveOptions {
  double t_final = 1.0;
  double h = 0.0;                    // grid spacing; 0 = auto
  std::optional<double> truncation;  // required for unbounded domains
  std::vector<double> snapshot_times;
  double dt = 0.0;                   // grid engine step; 0 = auto
};

struct KilledHeatField {
  enum class Method { Radial, Grid };
  Method method = Method::Radial;
  RadialField radial;
  GridField grid;

  // P(T > t): mass still inside at time t.
  double survival(double t) const;
  // P(T <= t) measured as cumulative absorbed flux. label -1 = all labels,
  // 0 = domain boundary, 1 = truncation sphere (grid method only).
  double exit_cdf(double t, int label = -1) const;
  // max over records of |1 - mass - total flux|; roundoff-sized.
  double conservation_gap() const;
};

KilledHeatField solve_killed_density(const geometry::Domain& dom,
                                     const geometry::Point& x0,
                                     const SolveOptions& opt);

// Exit-time CDF sampled on a time grid, from the absorbed-flux record.
std::vector<double> exit_cdf_flux(const KilledHeatField& field,
                                  const std::vector<double>& t_grid,
                                  int label = -1);

// Principal Dirichlet eigenvalue of -Laplacian. Bounded planar domains use
// a cut-cell finite-volume generalized eigenproblem T x = lambda V x (face
// transmissibilities shortened at boundary cuts, cell volumes arm-scaled);
// centered balls in R^3 reduce to the radial operator and strips to their
// 1D cross-section. Unbounded domains have no discrete spectrum bottom:
// lambda = 0 with the flag set.
struct EigenResult {
  double lambda = 0.0;
  bool unbounded = false;
  double h = 0.0;          // grid spacing used (0 for 1D reductions)
  double residual = 0.0;   // |T x - lambda V x| / |V x|, discrete check
  std::vector<geometry::Point> nodes;
  std::vector<double> mode;  // V-normalized, nonnegative
};

EigenResult eigen_lambda(const geometry::Domain& dom, double h = 0.0);

}  // namespace exitlab::pde
