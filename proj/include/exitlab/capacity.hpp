#pragma once

#include <vector>

#include "exitlab/geometry.hpp"

namespace exitlab::capacity {

using geometry::CompactSet;
using geometry::Domain;
using geometry::Point;

// Weighted point masses approximating a measure on (the boundary of) a set.
struct DiscretizedMeasure {
  std::vector<Point> support;
  std::vector<double> weight;
  double total() const;
};

struct CapacityReport {
  double value = 0.0;
  std::string kind;      // "logarithmic", "newtonian", "dirichlet"
  int points = 0;        // discretization size (nodes or cells across)
  double h = 0.0;        // grid spacing where applicable
  double refined = 0.0;  // Richardson-extrapolated value from two sizes
};

// Capacity of a compact set by discrete energy minimization over measures of
// unit mass (KKT solve with nonnegativity pruning). Normalizations:
//   n=2: logarithmic capacity, kernel -log|x-y|, cap = exp(-min energy)
//        (disk of radius r -> r, segment of length L -> L/4);
//   n=3: Newtonian capacity, kernel 1/|x-y|, cap = 1/(min energy)
//        (ball of radius r -> r).
// Cell self-energies use the cell's own capacity, so the diagonal carries
// the log/1-over-rho singularity correctly.
CapacityReport energy_capacity(const CompactSet& k, int points = 512);

// Dirichlet integral of the condenser potential: u = 1 on K, u = 0 on the
// boundary of D, energy = integral |grad u|^2 over D \ K by cut-cell finite
// volumes. Concentric disks give 2*pi / log(R/r). This is twice the
// equilibrium-measure mass below, matching the expected-occupation Green
// normalization.
CapacityReport dirichlet_condenser(const Domain& dom, const CompactSet& k,
                                   double h = 0.0);

// Equilibrium measure of K relative to a ball domain: the measure mu on K
// with Green potential identically 1 on K; total mass for concentric circles
// is pi / log(R/r). Nystrom collocation with singularity-corrected
// diagonal blocks.
struct BoundaryCell {
  Point x;
  double size;  // arc length (n=2) or patch area (n=3)
};
DiscretizedMeasure equilibrium_measure(const Domain& ball, const CompactSet& k,
                                       int points = 512);
// Same solve on caller-provided boundary cells (for sets outside the
// CompactSet catalog).
DiscretizedMeasure equilibrium_on_cells(const Domain& ball,
                                        const std::vector<BoundaryCell>& cells);

enum class Polarity { polar, nonpolar };
// Points are polar in n >= 2; segments are polar exactly in n = 3 (their
// Newtonian capacity vanishes); balls are never polar. A union is polar iff
// every component is.
Polarity polarity_check(const CompactSet& k);

}  // namespace exitlab::capacity
