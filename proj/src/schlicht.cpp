#include "exitlab/schlicht.hpp"

#include <cmath>
#include <stdexcept>

#include "exitlab/kernels.hpp"

namespace exitlab::harness {

namespace {

// Survival in a symmetric interval of half-width w from the midpoint; this
// is also the strip survival (the longitudinal coordinate never exits).
double interval_survival(double t, double w) {
  double s = 0.0;
  for (int j = 0; j < 64; ++j) {
    double k = 2.0 * j + 1.0;
    double sign = j % 2 == 0 ? 1.0 : -1.0;
    double term =
        (4.0 / (k * M_PI)) * std::exp(-k * k * M_PI * M_PI * t / (8.0 * w * w));
    s += sign * term;
    if (term < 1e-18) break;
  }
  return std::min(1.0, std::max(0.0, s));
}

constexpr double kDiskLambda = 5.783185962947;  // first Bessel zero squared

}  // namespace

double SchlichtEntry::survival(double t) const {
  if (!has_closed_survival)
    throw std::logic_error("SchlichtEntry::survival: no closed form for " + id);
  if (id == "disk") return kernels::ball_survival(t, 1.0, 2);
  if (id == "halfplane") return std::erf(0.5 / std::sqrt(2.0 * t));
  return interval_survival(t, M_PI / 4.0);  // strip
}

SchlichtEntry schlicht_entry(const std::string& id, double angle) {
  using geometry::Domain;
  using geometry::CompactSet;
  if (id == "disk")
    return {id, "z", Domain::ball({0.0, 0.0}, 1.0), kDiskLambda, 0.0, true};
  if (id == "halfplane")
    // Image {Re w > -1/2}; nearest boundary point at distance 1/2.
    return {id, "z/(1-z)", Domain::half_space({-1.0, 0.0}, 0.5), 0.0, 0.5,
            true};
  if (id == "strip")
    return {id, "log((1+z)/(1-z))/2", Domain::strip(M_PI / 4.0), 4.0, 0.0,
            true};
  if (id == "koebe")
    // Image is the plane minus the ray (-inf, -1/4]; the ray is truncated
    // at |w| = 3 for sampling. Paths at the time scales used here reach the
    // truncation point with negligible probability, so the bias is below
    // Monte Carlo resolution.
    return {id, "z/(1-z)^2",
            Domain::complement_of(
                CompactSet::segment({-0.25, 0.0}, {-3.0, 0.0})),
            0.0, 0.25, false};
  if (id == "sector") {
    double a = angle > 0.0 ? angle : M_PI / 2.0;
    // Power map image: sector of opening a with vertex at -pi/(2a), so the
    // normalization f'(0) = 1 holds.
    return {id, "(pi/(2a))*(((1+z)/(1-z))^(a/pi) - 1)", Domain::sector(a),
            0.0, M_PI / (2.0 * a), false};
  }
  throw std::invalid_argument("schlicht_entry: unknown id " + id);
}

std::vector<std::string> schlicht_ids() {
  return {"disk", "halfplane", "strip", "koebe", "sector"};
}

}  // namespace exitlab::harness
