#pragma once

#include <utility>
#include <vector>

namespace exitlab::pde {

// Killed heat semigroup on a centered ball, radially symmetric initial mass
// at the origin. Finite-volume discretization in the radius: cells of width
// h, face transmissibility sigma_n r^(n-1) / h, Dirichlet data 0 at r = R
// applied over the half-cell h/2. Crank-Nicolson in time on a graded grid
// (dt proportional to t), so early times after the near-delta start are
// resolved without paying for them at late times.
//
// Mass accounting is exact at the discrete level: the recorded cumulative
// boundary flux satisfies mass(t) + flux(t) = 1 up to roundoff, by
// construction of the finite-volume update.
struct RadialOptions {
  // Space dimension. n = 1 solves the symmetric interval (-R, R) from its
  // midpoint (no-flux face at 0), which is the strip cross-section.
  int n = 2;
  double radius = 1.0;  // ball radius (half-width for n = 1)
  int cells = 1000;
  double t_final = 1.0;
  // dt = clamp(step_ratio * t, dt_floor, inf); dt_floor defaults to t0/8.
  double step_ratio = 1e-3;
  double t0 = 0.0;      // initial spread; 0 = auto (16 h^2)
  std::vector<double> snapshot_times;
  double probe_radius = -1.0;  // if >= 0, record u(t, probe_radius) each step
};

struct RadialField {
  int n = 2;
  double radius = 1.0, h = 0.0, t0 = 0.0;
  std::vector<double> centers;  // cell centers
  std::vector<double> volumes;

  // Per-step records.
  std::vector<double> times;
  std::vector<double> mass;       // interior mass = P(T > t)
  std::vector<double> flux;       // cumulative mass absorbed at r = R
  std::vector<std::pair<double, std::vector<double>>> snapshots;
  std::vector<std::pair<double, double>> probe;

  double mass_at(double t) const;
  double flux_at(double t) const;
  // max over records of |1 - mass - flux|; roundoff-sized by construction
  double conservation_gap() const;
};

RadialField radial_solve(const RadialOptions& opt);

// Smallest Dirichlet eigenvalue of -Laplacian on the ball (annulus if
// r_inner > 0), radial mode, by inverse power iteration on the same
// finite-volume operator. Result for the unit disk is j_{0,1}^2.
double radial_eigenvalue(int n, double r_inner, double r_outer, int cells);

// Smallest Dirichlet eigenvalue of -u'' on an interval of the given length:
// the 1D cross-section used for strips, (pi/length)^2.
double interval_eigenvalue(double length, int cells);

}  // namespace exitlab::pde
