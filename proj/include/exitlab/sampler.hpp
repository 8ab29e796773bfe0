#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "exitlab/geometry.hpp"
#include "exitlab/rng.hpp"

namespace exitlab::sampler {

using geometry::CompactSet;
using geometry::Domain;
using geometry::Point;

struct ExitSample {
  double t = 0.0;
  Point where;
  long steps = 0;
  bool ok = false;  // false: step cap hit before exit
};

// Euler-Maruyama with a Brownian-bridge crossing test against the tangent
// plane at the nearest boundary point. Exit points are projected onto the
// boundary; polar boundary pieces are invisible.
ExitSample em_exit(const Domain& dom, const Point& x0, double dt,
                   rng::Philox& g, long max_steps = 500'000'000L);

// Walk on spheres: each hop uses the exact distance to the (non-polar)
// boundary and adds R^2 times an exit-time draw for the unit ball. Requires
// exact distance queries (mask domains are rejected).
ExitSample wos_exit(const Domain& dom, const Point& x0, double eps,
                    rng::Philox& g, long max_steps = 20'000'000L);

struct BatchOptions {
  enum class Engine { Em, Wos };
  Engine engine = Engine::Wos;
  double param = 1e-6;  // dt for Em, eps for Wos
  size_t count = 10'000;
  uint64_t seed = 1;
  int threads = 1;
  long max_steps = 0;  // 0 = engine default
};

// Sample i always uses substream (seed, i), so results are identical for any
// thread count.
struct ExitSampleBatch {
  std::string domain_id;
  std::string engine;
  double param = 0.0;
  uint64_t seed = 0;
  int dim = 2;
  std::vector<double> times;   // exit times, sample order
  std::vector<Point> points;   // exit locations
  size_t failures = 0;         // step-capped walks (excluded from times)
};

ExitSampleBatch run_batch(const Domain& dom, const Point& x0,
                          const BatchOptions& opt);

struct CdfEstimate {
  std::vector<double> t;
  std::vector<double> cdf;
  size_t n = 0;
  double dkw = 0.0;  // uniform band half-width at the requested alpha
};

CdfEstimate empirical_cdf(const std::vector<double>& times,
                          const std::vector<double>& t_grid, double alpha);

// Power-law fit of the survival tail P(T > t) ~ t^(-a) over a window.
// exponent = a (positive for decaying tails). Subsample spread gives the
// standard error; significant downward curvature in log-log marks faster
// than polynomial decay (bounded domains).
struct TailFit {
  double exponent = 0.0;
  double se = 0.0;
  double curvature = 0.0;      // quadratic coefficient in log-log
  double curvature_se = 0.0;
  bool superpolynomial = false;
  int points = 0;
};

TailFit fit_tail_exponent(const std::vector<double>& times, double t_lo,
                          double t_hi);

// Exponential-rate fit: lambda from -2 log P(T > t) ~ lambda t + const.
struct LambdaFit {
  double lambda = 0.0;
  double se = 0.0;
  double curvature = 0.0;  // quadratic coefficient in t; drift flags misfit
  int points = 0;
};

LambdaFit fit_lambda(const std::vector<double>& times, double t_lo,
                     double t_hi);
// Same fit from an explicit survival curve (e.g. PDE mass record).
LambdaFit fit_lambda_curve(const std::vector<double>& t,
                           const std::vector<double>& survival);

// P(hit target before leaving outer), by position-only walk on spheres in
// outer minus target. Nonpolar target parts register within eps; point
// parts only on exact coincidence, so their hit count stays honest. Returns
// a 99% normal half-width alongside the estimate.
struct HitEstimate {
  double p = 0.0;
  double half_width = 0.0;
  size_t n = 0;
};

HitEstimate hit_before_exit(const Domain& outer, const CompactSet& target,
                            const Point& x0, size_t count, uint64_t seed,
                            double eps = 1e-6, int threads = 1);

}  // namespace exitlab::sampler
