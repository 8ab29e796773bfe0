#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "exitlab/capacity.hpp"
#include "exitlab/kernels.hpp"
#include "exitlab/sampler.hpp"

using namespace exitlab;
using geometry::CompactSet;
using geometry::Domain;
using geometry::Point;

TEST_CASE("logarithmic capacity of classical sets") {
  auto disk = capacity::energy_capacity(CompactSet::closed_ball({0, 0}, 0.25), 512);
  CHECK(disk.kind == "logarithmic");
  CHECK(disk.refined == doctest::Approx(0.25).epsilon(0.01));

  auto seg = capacity::energy_capacity(
      CompactSet::segment({-2.0, 0.0}, {2.0, 0.0}), 512);
  CHECK(seg.refined == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("newtonian capacity of the unit ball") {
  auto ball = capacity::energy_capacity(
      CompactSet::closed_ball({0, 0, 0}, 1.0), 1024);
  CHECK(ball.kind == "newtonian");
  CHECK(ball.refined == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("capacity scales linearly with the set") {
  auto one = capacity::energy_capacity(CompactSet::closed_ball({0, 0}, 0.4), 384);
  auto three = capacity::energy_capacity(CompactSet::closed_ball({0, 0}, 1.2), 384);
  CHECK(three.refined == doctest::Approx(3.0 * one.refined).epsilon(0.01));

  // inclusion monotonicity
  auto small = capacity::energy_capacity(
      CompactSet::segment({-0.5, 0.0}, {0.5, 0.0}), 384);
  auto large = capacity::energy_capacity(
      CompactSet::segment({-0.9, 0.0}, {0.9, 0.0}), 384);
  CHECK(small.refined < large.refined);
}

TEST_CASE("separated unions approach the capacity sum only loosely") {
  // two far disks: joint capacity exceeds each piece alone
  auto pair = capacity::energy_capacity(
      CompactSet::finite_union({CompactSet::closed_ball({-40.0, 0.0}, 1.0),
                                CompactSet::closed_ball({40.0, 0.0}, 1.0)}),
      512);
  auto lone = capacity::energy_capacity(CompactSet::closed_ball({0, 0}, 1.0), 256);
  CHECK(pair.refined > lone.refined);
}

TEST_CASE("polar sets under the energy minimizer") {
  // a bare point has infinite energy, hence capacity zero
  auto pt = capacity::energy_capacity(CompactSet::single_point({1, 0}), 64);
  CHECK(pt.value == 0.0);
  CHECK(pt.refined == 0.0);
  // 3D segments would diverge under refinement; rejected outright
  CHECK_THROWS_AS(capacity::energy_capacity(
                      CompactSet::segment({0, 0, 0}, {1, 0, 0}), 64),
                  std::invalid_argument);
}

TEST_CASE("condenser energy of concentric disks") {
  auto dom = Domain::ball({0, 0}, std::exp(1.0));
  auto rep = capacity::dirichlet_condenser(
      dom, CompactSet::closed_ball({0, 0}, 1.0));
  CHECK(rep.kind == "dirichlet");
  CHECK(rep.refined == doctest::Approx(2.0 * M_PI).epsilon(0.01));
}

TEST_CASE("condenser energy is scale invariant in the plane") {
  auto a = capacity::dirichlet_condenser(
      Domain::ball({0, 0}, 2.0), CompactSet::closed_ball({0, 0}, 1.0), 0.01);
  auto b = capacity::dirichlet_condenser(
      Domain::ball({0, 0}, 3.0), CompactSet::closed_ball({0, 0}, 1.5), 0.015);
  CHECK(a.value == doctest::Approx(b.value).epsilon(0.005));
}

TEST_CASE("enlarging the plate raises the condenser energy") {
  auto dom = Domain::ball({0, 0}, 2.0);
  auto small = capacity::dirichlet_condenser(
      dom, CompactSet::closed_ball({0, 0}, 0.5), 0.02);
  auto large = capacity::dirichlet_condenser(
      dom, CompactSet::closed_ball({0, 0}, 1.0), 0.02);
  CHECK(large.value > small.value);
}

TEST_CASE("spherical condenser in three dimensions") {
  // u = (R/r - 1)/(R - 1) between the spheres gives 4 pi R / (R - 1)
  auto rep = capacity::dirichlet_condenser(
      Domain::ball({0, 0, 0}, 2.0), CompactSet::closed_ball({0, 0, 0}, 1.0));
  CHECK(rep.value == doctest::Approx(8.0 * M_PI).epsilon(0.001));
}

TEST_CASE("equilibrium measure of concentric circles") {
  auto dom = Domain::ball({0, 0}, std::exp(1.0));
  auto mu = capacity::equilibrium_measure(
      dom, CompactSet::closed_ball({0, 0}, 1.0), 512);
  CHECK(mu.total() == doctest::Approx(M_PI).epsilon(0.02));

  // rotational symmetry: weights uniform to 1% relative spread
  double mean = mu.total() / double(mu.weight.size());
  for (double w : mu.weight) CHECK(std::fabs(w / mean - 1.0) < 0.01);

  // Green potential of the measure reconstructs the harmonic hit probability
  Point x(std::sqrt(std::exp(1.0)), 0.0);
  double pot = 0.0;
  for (size_t j = 0; j < mu.weight.size(); ++j)
    pot += kernels::green_closed_form(dom, x, mu.support[j]) * mu.weight[j];
  CHECK(pot == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("equilibrium potential matches monte carlo hitting") {
  auto dom = Domain::ball({0, 0}, std::exp(1.0));
  auto mu = capacity::equilibrium_measure(
      dom, CompactSet::closed_ball({0, 0}, 1.0), 512);
  Point x(std::sqrt(std::exp(1.0)), 0.0);
  double pot = 0.0;
  for (size_t j = 0; j < mu.weight.size(); ++j)
    pot += kernels::green_closed_form(dom, x, mu.support[j]) * mu.weight[j];
  auto est = sampler::hit_before_exit(dom, CompactSet::closed_ball({0, 0}, 1.0),
                                      x, 20000, 40, 1e-6, 8);
  double se = est.half_width / 2.576;
  CHECK(std::fabs(pot - est.p) < 3.0 * se + 0.01);
}

TEST_CASE("dirichlet value doubles the equilibrium mass") {
  auto dom = Domain::ball({0, 0}, std::exp(1.0));
  auto k = CompactSet::closed_ball({0, 0}, 1.0);
  auto I = capacity::dirichlet_condenser(dom, k);
  auto mu = capacity::equilibrium_measure(dom, k, 512);
  CHECK(I.refined == doctest::Approx(2.0 * mu.total()).epsilon(0.03));
}

TEST_CASE("equilibrium mass scales as the reciprocal log ratio") {
  // mass * log(R/r) stays constant across plate radii
  auto dom = Domain::ball({0, 0}, std::exp(1.0));
  double products[2];
  int idx = 0;
  for (double r : {0.8, 1.25}) {
    auto mu = capacity::equilibrium_measure(
        dom, CompactSet::closed_ball({0, 0}, r), 512);
    products[idx++] = mu.total() * std::log(std::exp(1.0) / r);
  }
  CHECK(products[0] == doctest::Approx(products[1]).epsilon(0.02));
}

TEST_CASE("concentric spheres in three dimensions") {
  // mass 2 pi R / (R - 1), half the condenser value
  auto dom = Domain::ball({0, 0, 0}, 2.0);
  auto mu = capacity::equilibrium_measure(
      dom, CompactSet::closed_ball({0, 0, 0}, 1.0), 1024);
  CHECK(mu.total() == doctest::Approx(4.0 * M_PI).epsilon(0.01));
  auto I = capacity::dirichlet_condenser(dom, CompactSet::closed_ball({0, 0, 0}, 1.0));
  CHECK(I.value == doctest::Approx(2.0 * mu.total()).epsilon(0.03));
}

TEST_CASE("polarity classification") {
  CHECK(capacity::polarity_check(CompactSet::single_point({1, 0})) ==
        capacity::Polarity::polar);
  CHECK(capacity::polarity_check(CompactSet::segment({0, 0}, {1, 0})) ==
        capacity::Polarity::nonpolar);
  CHECK(capacity::polarity_check(CompactSet::closed_ball({0, 0}, 0.1)) ==
        capacity::Polarity::nonpolar);
  // segments are polar exactly in three dimensions
  CHECK(capacity::polarity_check(CompactSet::segment({0, 0, 0}, {1, 0, 0})) ==
        capacity::Polarity::polar);
  CHECK(capacity::polarity_check(CompactSet::closed_ball({0, 0, 0}, 0.1)) ==
        capacity::Polarity::nonpolar);
  // unions: polar iff every part is
  CHECK(capacity::polarity_check(CompactSet::finite_union(
            {CompactSet::single_point({1, 0}),
             CompactSet::single_point({2, 0})})) == capacity::Polarity::polar);
  CHECK(capacity::polarity_check(CompactSet::finite_union(
            {CompactSet::single_point({1, 0}),
             CompactSet::segment({2, 0}, {3, 0})})) ==
        capacity::Polarity::nonpolar);
}

TEST_CASE("equilibrium solver rejects polar plates") {
  auto dom = Domain::ball({0, 0}, 2.0);
  CHECK_THROWS_AS(capacity::equilibrium_measure(
                      dom, CompactSet::single_point({0.5, 0.0}), 64),
                  std::invalid_argument);
  auto dom3 = Domain::ball({0, 0, 0}, 2.0);
  CHECK_THROWS_AS(capacity::equilibrium_measure(
                      dom3, CompactSet::segment({0, 0, 0}, {1, 0, 0}), 64),
                  std::invalid_argument);
}
