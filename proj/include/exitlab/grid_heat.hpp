#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "exitlab/geometry.hpp"

namespace exitlab::pde {

// Killed heat semigroup on a planar region given by a node predicate.
// Node-centered lattice anchored at the start point (so the start is a
// node), 5-point stencil, absorbing at every lattice edge that leaves the
// region. Each absorbing edge carries a label so exit mass can be split by
// which boundary piece took it (e.g. compact obstacle vs truncation sphere).
struct GridRegion {
  std::function<bool(const geometry::Point&)> inside;
  // Label for points outside the region; must return a value in
  // [0, n_labels). Only evaluated on outside points.
  std::function<int(const geometry::Point&)> label;
  int n_labels = 1;
  // Lattice extent; every inside point must lie strictly within.
  geometry::Point lo, hi;
};

// Piecewise-constant time step: one matrix factorization per phase.
struct GridPhase {
  double t_end;
  double dt;
};

struct GridOptions {
  geometry::Point x0;
  double h = 0.01;
  std::vector<GridPhase> phases;
  double t0 = 0.0;  // Gaussian init spread; 0 = auto (16 h^2)
  std::vector<double> snapshot_times;  // recorded at the nearest step
};

struct GridField {
  double h = 0.0, t0 = 0.0;
  std::vector<geometry::Point> nodes;

  std::vector<double> times;
  std::vector<double> mass;
  std::vector<std::vector<double>> flux;  // [label][record], cumulative
  std::vector<std::pair<double, std::vector<double>>> snapshots;

  double mass_at(double t) const;
  double flux_at(double t, int label) const;
  double conservation_gap() const;  // max |1 - mass - sum_labels flux|
  // Value of a stored snapshot at the node nearest to p.
  double snapshot_value(size_t snap, const geometry::Point& p) const;
};

GridField grid_solve(const GridRegion& region, const GridOptions& opt);

// Region for a domain, polar-blind (punctures and point components do not
// absorb), optionally truncated by |x| < trunc_radius with its own label:
// label 0 = domain boundary, label 1 = truncation sphere. The region borrows
// dom: the domain must outlive every use of the returned closures.
GridRegion region_from_domain(const geometry::Domain& dom,
                              std::optional<double> trunc_radius);

}  // namespace exitlab::pde
