#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "exitlab/geometry.hpp"

namespace exitlab::kernels {

using geometry::Domain;
using geometry::Point;

// Positive zeros j_{nu,k} of the Bessel function J_nu for nu = n/2 - 1,
// together with J_{nu+1}(j_{nu,k}). 64 zeros cover series evaluation down to
// t/R^2 ~ 5e-3; below that the survival differs from 1 by < 1e-20.
struct BesselTable {
  static constexpr int kCount = 64;
  double nu;
  std::array<double, kCount> zero;
  std::array<double, kCount> weight;  // J_{nu+1}(zero[k])
};

// n = 2 or 3. Built once on first use, by bracket scan + bisection on
// std::cyl_bessel_j.
const BesselTable& bessel_table(int n);

// Free-space transition density (2*pi*t)^{-n/2} exp(-|x-y|^2 / (2t)) for the
// generator (1/2)*Laplacian.
double heat_kernel(double t, const Point& x, const Point& y);

// Truncation report for series evaluations.
struct SeriesTail {
  int terms_used = 0;
  double truncation_bound = 0.0;
};

// P_0(T > t) for the exit time T of B(0,R) in R^n, by Dirichlet eigenfunction
// expansion. Valid for all t > 0; needs O(R/sqrt(t)) terms as t -> 0.
double ball_survival_series(double t, double R, int n, SeriesTail* tail = nullptr);

// Same quantity, but switching to a cached radial finite-volume solution for
// t/R^2 below kBallSurvivalSwitch, where the series needs many terms. The
// cache is calibrated to the series at the switch point so the result is
// continuous and monotone across it.
inline constexpr double kBallSurvivalSwitch = 0.2;
double ball_survival(double t, double R, int n);

// Inverse CDF of the exit time of B(0,1): returns t with P(T <= t) = u.
// 2048-entry table lookup plus Newton steps on the series.
double ball_exit_quantile(double u, int n);

// P_x(T <= t) for a half-space at distance d: the one-sided level-crossing law
// erfc(d / sqrt(2 t)).
double halfspace_exit_cdf(double t, double d);

// P_x(tau_{B(0,r)} < infinity) for |x| >= r: 1 in the plane, (r/|x|)^(n-2)
// in R^3.
double ball_hit_prob(double r, const Point& x);

// Green's function for the expected-occupation normalization
// G(x,y) = integral_0^inf p_D(s,x,y) ds (twice the -Laplacian Green's
// function). Closed forms for Ball and HalfSpace.
double green_closed_form(const Domain& dom, const Point& x, const Point& y);

// Coefficient of the 1/t decay exponent for the two-sided cone of the
// m-spoke spider construction: cos^2(pi/m) / 2.
double mcconnell_rate(int m);

// Dumps the Bessel table contents for the CLI.
struct BesselDump {
  int n;
  std::vector<double> zeros;
  std::vector<double> weights;
};
BesselDump bessel_dump(int n);

}  // namespace exitlab::kernels
