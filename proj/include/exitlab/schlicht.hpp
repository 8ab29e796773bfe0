#pragma once

#include <string>
#include <vector>

#include "exitlab/geometry.hpp"

namespace exitlab::harness {

// Catalog of conformal images of the unit disk under maps normalized to
// f(0) = 0, f'(0) = 1, together with reference constants for their exit-time
// laws seen from the origin. Exactly one of the two references is active:
// lambda_ref > 0 for exponential tails P(T > t) ~ c exp(-lambda t / 2),
// h_ref > 0 for polynomial tails P(T > t) ~ c t^(-h).
struct SchlichtEntry {
  std::string id;
  std::string map;  // the univalent map, as a formula in z
  geometry::Domain domain;
  double lambda_ref = 0.0;
  double h_ref = 0.0;
  bool has_closed_survival = false;

  // P(T > t) from the origin where a closed form exists (disk, halfplane,
  // strip). Throws for catalog entries that need Monte Carlo.
  double survival(double t) const;
};

// Entries: "disk", "halfplane", "strip", "koebe", "sector". The sector
// aperture is configurable (full opening angle); other ids ignore it.
// Unknown ids throw.
SchlichtEntry schlicht_entry(const std::string& id, double angle = 0.0);
std::vector<std::string> schlicht_ids();

}  // namespace exitlab::harness
