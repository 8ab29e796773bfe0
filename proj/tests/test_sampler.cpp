#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exitlab/kernels.hpp"
#include "exitlab/pde.hpp"
#include "exitlab/sampler.hpp"
#include "exitlab/stats.hpp"

using namespace exitlab;
using geometry::CompactSet;
using geometry::Domain;
using geometry::Point;

TEST_CASE("batches are bit-identical for any thread count") {
  sampler::BatchOptions bo;
  bo.engine = sampler::BatchOptions::Engine::Wos;
  bo.param = 1e-6;
  bo.count = 2000;
  bo.seed = 17;
  auto dom = Domain::ball({0, 0}, 1.0);
  bo.threads = 1;
  auto b1 = sampler::run_batch(dom, Point(0.2, 0.1), bo);
  bo.threads = 5;
  auto b5 = sampler::run_batch(dom, Point(0.2, 0.1), bo);
  REQUIRE(b1.times.size() == b5.times.size());
  for (size_t i = 0; i < b1.times.size(); ++i) {
    CHECK(b1.times[i] == b5.times[i]);
    CHECK(b1.points[i][0] == b5.points[i][0]);
    CHECK(b1.points[i][1] == b5.points[i][1]);
  }
}

TEST_CASE("wos exit points land on the boundary") {
  sampler::BatchOptions bo;
  bo.engine = sampler::BatchOptions::Engine::Wos;
  bo.param = 1e-6;
  bo.count = 500;
  bo.seed = 21;
  auto dom = Domain::ball({0, 0}, 1.0);
  auto b = sampler::run_batch(dom, Point(0.3, -0.2), bo);
  for (const auto& p : b.points) CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("wos single-step disk law matches the series inside the DKW band") {
  sampler::BatchOptions bo;
  bo.engine = sampler::BatchOptions::Engine::Wos;
  bo.param = 1e-6;
  bo.count = 20000;
  bo.seed = 9;
  bo.threads = 8;
  auto b = sampler::run_batch(Domain::ball({0, 0}, 1.0), Point(0, 0), bo);
  std::vector<double> grid;
  for (double t = 0.05; t <= 4.0; t *= 1.15) grid.push_back(t);
  auto cdf = sampler::empirical_cdf(b.times, grid, 0.01);
  for (size_t i = 0; i < grid.size(); ++i) {
    double truth = 1.0 - kernels::ball_survival(grid[i], 1.0, 2);
    CHECK(std::fabs(cdf.cdf[i] - truth) <= cdf.dkw);
  }
}

TEST_CASE("em disk mean matches the quadratic mean-exit formula") {
  // E T = (R^2 - |x0|^2)/n for the ball
  sampler::BatchOptions bo;
  bo.engine = sampler::BatchOptions::Engine::Em;
  bo.param = 2.5e-4;
  bo.count = 20000;
  bo.seed = 2;
  bo.threads = 8;
  auto b = sampler::run_batch(Domain::ball({0, 0}, 1.0), Point(0, 0), bo);
  CHECK(stats::mean(b.times) == doctest::Approx(0.5).epsilon(0.02));

  sampler::BatchOptions b3 = bo;
  b3.count = 10000;
  b3.seed = 3;
  auto bb = sampler::run_batch(Domain::ball({0, 0, 0}, 1.0), Point(0, 0, 0), b3);
  CHECK(stats::mean(bb.times) == doctest::Approx(1.0 / 3.0).epsilon(0.03));
}

TEST_CASE("em halfspace median matches the level-crossing law") {
  // median solves erfc(1/sqrt(2t)) = 1/2; capped walks all sort above it
  sampler::BatchOptions bo;
  bo.engine = sampler::BatchOptions::Engine::Em;
  bo.param = 5e-3;
  bo.count = 20000;
  bo.seed = 1;
  bo.threads = 8;
  bo.max_steps = 200000;
  auto b = sampler::run_batch(Domain::half_space({1, 0}, 1.0), Point(0, 0), bo);
  auto ts = b.times;
  std::sort(ts.begin(), ts.end());
  size_t total = ts.size() + b.failures;
  REQUIRE(total / 2 < ts.size());
  CHECK(std::fabs(ts[total / 2] - 2.1981) < 0.05);
}

TEST_CASE("wos and em sample the same disk law") {
  sampler::BatchOptions w;
  w.engine = sampler::BatchOptions::Engine::Wos;
  w.param = 1e-4;
  w.count = 4000;
  w.seed = 4;
  w.threads = 8;
  auto bw = sampler::run_batch(Domain::ball({0, 0}, 1.0), Point(0, 0), w);
  sampler::BatchOptions e;
  e.engine = sampler::BatchOptions::Engine::Em;
  e.param = 1e-5;
  e.count = 4000;
  e.seed = 5;
  e.threads = 8;
  auto be = sampler::run_batch(Domain::ball({0, 0}, 1.0), Point(0, 0), e);
  auto ks = stats::ks_two_sample(bw.times, be.times, 0.01);
  CHECK(!ks.reject);
}

TEST_CASE("punctures leave the exit law untouched") {
  sampler::BatchOptions bo;
  bo.engine = sampler::BatchOptions::Engine::Wos;
  bo.param = 1e-6;
  bo.count = 20000;
  bo.threads = 8;
  bo.seed = 12;
  // start away from the puncture so walks genuinely pass near it
  auto punct = sampler::run_batch(
      Domain::punctured(Domain::ball({0, 0}, 1.0), {Point(0.0, 0.0)}),
      Point(0.3, 0.0), bo);
  bo.seed = 13;
  auto plain = sampler::run_batch(Domain::ball({0, 0}, 1.0), Point(0.3, 0.0), bo);
  auto ks = stats::ks_two_sample(punct.times, plain.times, 0.01);
  CHECK(!ks.reject);
}

TEST_CASE("halving the wos shell moves means by less than the shell bound") {
  // same substreams couple the runs; the finer walk only appends hops
  sampler::BatchOptions a;
  a.engine = sampler::BatchOptions::Engine::Wos;
  a.param = 1e-3;
  a.count = 20000;
  a.seed = 8;
  a.threads = 8;
  auto ba = sampler::run_batch(Domain::ball({0, 0}, 1.0), Point(0.3, 0.2), a);
  sampler::BatchOptions c = a;
  c.param = 5e-4;
  auto bc = sampler::run_batch(Domain::ball({0, 0}, 1.0), Point(0.3, 0.2), c);
  double diff = stats::mean(bc.times) - stats::mean(ba.times);
  CHECK(diff >= 0.0);
  CHECK(diff < 3.0 * a.param);
}

TEST_CASE("empirical cdf mechanics") {
  CHECK(stats::dkw_halfwidth(10000, 0.01) == doctest::Approx(0.016277).epsilon(1e-4));
  std::vector<double> times{0.5, 0.1, 0.9, 0.4, 0.2};
  std::vector<double> grid{0.0, 0.15, 0.45, 1.0};
  auto cdf = sampler::empirical_cdf(times, grid, 0.05);
  CHECK(cdf.cdf[0] == doctest::Approx(0.0));
  CHECK(cdf.cdf[1] == doctest::Approx(0.2));
  CHECK(cdf.cdf[2] == doctest::Approx(0.6));
  CHECK(cdf.cdf[3] == doctest::Approx(1.0));
  for (size_t i = 1; i < cdf.cdf.size(); ++i) CHECK(cdf.cdf[i] >= cdf.cdf[i - 1]);
  CHECK_THROWS_AS(sampler::empirical_cdf({}, grid, 0.05), std::invalid_argument);
}

TEST_CASE("tail exponent fits") {
  // halfplane entry geometry: distance 1/2 from the origin
  sampler::BatchOptions bo;
  bo.engine = sampler::BatchOptions::Engine::Wos;
  bo.param = 1e-6;
  bo.count = 20000;
  bo.seed = 30;
  bo.threads = 8;
  auto b = sampler::run_batch(Domain::half_space({-1, 0}, 0.5), Point(0, 0), bo);
  auto ts = b.times;
  std::sort(ts.begin(), ts.end());
  auto fit = sampler::fit_tail_exponent(ts, ts[ts.size() / 2], ts[ts.size() - 32]);
  CHECK(fit.exponent == doctest::Approx(0.5).epsilon(0.10));
  CHECK(!fit.superpolynomial);

  // the disk's exponential tail must trip the curvature flag
  sampler::BatchOptions d = bo;
  d.seed = 31;
  auto bd = sampler::run_batch(Domain::ball({0, 0}, 1.0), Point(0, 0), d);
  auto tsd = bd.times;
  std::sort(tsd.begin(), tsd.end());
  auto fd = sampler::fit_tail_exponent(tsd, tsd[tsd.size() / 2], tsd[tsd.size() - 32]);
  CHECK(fd.superpolynomial);
}

TEST_CASE("lambda fits from pde survival curves") {
  pde::SolveOptions so;
  so.t_final = 4.0;
  auto disk = pde::solve_killed_density(Domain::ball({0, 0}, 1.0), Point(0, 0), so);
  std::vector<double> t, s;
  for (double x = 1.0; x <= 4.0; x += 0.05) {
    t.push_back(x);
    s.push_back(disk.survival(x));
  }
  auto fit = sampler::fit_lambda_curve(t, s);
  CHECK(fit.lambda == doctest::Approx(5.783186).epsilon(0.02));

  so.t_final = 8.0;
  auto strip = pde::solve_killed_density(Domain::strip(M_PI / 4.0), Point(0, 0), so);
  std::vector<double> t2, s2;
  for (double x = 2.0; x <= 8.0; x += 0.1) {
    t2.push_back(x);
    s2.push_back(strip.survival(x));
  }
  auto fs = sampler::fit_lambda_curve(t2, s2);
  CHECK(fs.lambda == doctest::Approx(4.0).epsilon(0.05));

  // scaling: the radius-2 ball decays at a quarter of the disk rate
  so.t_final = 16.0;
  auto big = pde::solve_killed_density(Domain::ball({0, 0}, 2.0), Point(0, 0), so);
  std::vector<double> t3, s3;
  for (double x = 4.0; x <= 16.0; x += 0.2) {
    t3.push_back(x);
    s3.push_back(big.survival(x));
  }
  auto fb = sampler::fit_lambda_curve(t3, s3);
  CHECK(fb.lambda == doctest::Approx(fit.lambda / 4.0).epsilon(0.02));
}

TEST_CASE("hitting probabilities against harmonic oracles") {
  // concentric annulus: log(R/|x|)/log(R/r) = 1/2 at |x| = sqrt(2)
  auto est = sampler::hit_before_exit(Domain::ball({0, 0}, 2.0),
                                      CompactSet::closed_ball({0, 0}, 1.0),
                                      Point(std::sqrt(2.0), 0.0), 20000, 6,
                                      1e-6, 8);
  CHECK(std::fabs(est.p - 0.5) <= est.half_width);

  // degenerate starts are rejected, not estimated
  CHECK_THROWS_AS(sampler::hit_before_exit(Domain::ball({0, 0}, 2.0),
                                           CompactSet::closed_ball({0, 0}, 1.0),
                                           Point(0.5, 0.0), 100, 6),
                  std::invalid_argument);
  CHECK_THROWS_AS(sampler::hit_before_exit(Domain::ball({0, 0}, 2.0),
                                           CompactSet::closed_ball({0, 0}, 1.0),
                                           Point(2.0, 0.0), 100, 6),
                  std::invalid_argument);
}

TEST_CASE("transient hitting probability in three dimensions") {
  // truncated oracle (r/|x| - r/R)/(1 - r/R); spec band 0.5 +- 0.01 at R=64
  auto est = sampler::hit_before_exit(Domain::ball({0, 0, 0}, 64.0),
                                      CompactSet::closed_ball({0, 0, 0}, 1.0),
                                      Point(2.0, 0.0, 0.0), 50000, 7, 1e-6, 8);
  CHECK(std::fabs(est.p - 0.5) < 0.01);
  double truncated = (0.5 - 1.0 / 64.0) / (1.0 - 1.0 / 64.0);
  CHECK(std::fabs(est.p - truncated) < 1.2 * est.half_width);
}

TEST_CASE("sampler rejects bad inputs") {
  auto dom = Domain::ball({0, 0}, 1.0);
  rng::Philox g(1, 0);
  CHECK_THROWS_AS(sampler::em_exit(dom, Point(0, 0), 0.0, g),
                  std::invalid_argument);
  CHECK_THROWS_AS(sampler::wos_exit(dom, Point(0, 0), 0.0, g),
                  std::invalid_argument);
  CHECK_THROWS_AS(sampler::wos_exit(dom, Point(2.0, 0.0), 1e-6, g),
                  std::invalid_argument);
  // a domain whose boundary is a single point has no reachable boundary
  auto polar = Domain::complement_of(CompactSet::single_point({0.5, 0.0}));
  CHECK_THROWS_AS(sampler::wos_exit(polar, Point(0, 0), 1e-6, g),
                  std::invalid_argument);
  sampler::BatchOptions bo;
  bo.count = 0;
  CHECK_THROWS_AS(sampler::run_batch(dom, Point(0, 0), bo),
                  std::invalid_argument);
}
