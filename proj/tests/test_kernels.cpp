#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "exitlab/kernels.hpp"

using namespace exitlab;
using namespace exitlab::kernels;
using exitlab::geometry::Domain;
using exitlab::geometry::Point;

TEST_CASE("bessel table zeros") {
  const auto& t2 = bessel_table(2);
  CHECK(t2.zero[0] == doctest::Approx(2.404825557696).epsilon(1e-12));
  CHECK(t2.zero[1] == doctest::Approx(5.520078110286).epsilon(1e-12));
  const auto& t3 = bessel_table(3);
  // J_{1/2} zeros are the multiples of pi
  for (int k = 0; k < 8; ++k)
    CHECK(t3.zero[k] == doctest::Approx((k + 1) * M_PI).epsilon(1e-12));
  for (int k = 1; k < BesselTable::kCount; ++k) {
    CHECK(t2.zero[k] > t2.zero[k - 1]);
    CHECK(std::fabs(std::cyl_bessel_j(t2.nu, t2.zero[k])) < 1e-12);
  }
}

TEST_CASE("free kernel point values and symmetry") {
  Point z(0, 0);
  CHECK(heat_kernel(1.0, z, z) == doctest::Approx(1.0 / (2.0 * M_PI)));
  CHECK(heat_kernel(0.5, z, Point(1, 0)) ==
        doctest::Approx(std::exp(-1.0) / M_PI));
  Point a(0.3, -0.7), b(-1.1, 0.2);
  CHECK(heat_kernel(0.8, a, b) == heat_kernel(0.8, b, a));
  CHECK_THROWS_AS(heat_kernel(0.0, z, z), std::invalid_argument);
}

TEST_CASE("free kernel integrates to one") {
  // midpoint quadrature over a radius 8*sqrt(t) box
  const double t = 0.37;
  const double R = 8.0 * std::sqrt(t);
  const int N = 400;
  const double h = 2.0 * R / N;
  double sum = 0.0;
  Point x(0.1, -0.2);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Point y(x[0] - R + (i + 0.5) * h, x[1] - R + (j + 0.5) * h);
      sum += heat_kernel(t, x, y) * h * h;
    }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("ball survival series endpoints and frozen values") {
  CHECK_THROWS_AS(ball_survival(0.0, 1.0, 2), std::invalid_argument);
  CHECK(ball_survival(1e-6, 1.0, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ball_survival(1e-6, 2.5, 3) == doctest::Approx(1.0).epsilon(1e-12));
  // leading term 2/(j01 J1(j01)) exp(-j01^2/2), plus the fast-decaying rest
  CHECK(ball_survival(1.0, 1.0, 2) == doctest::Approx(0.088889716).epsilon(1e-7));
  CHECK(ball_survival(1.0, 1.0, 3) == doctest::Approx(0.014383761).epsilon(1e-6));
}

TEST_CASE("ball survival scaling identity is exact") {
  CHECK(ball_survival(1.0, 1.0, 2) == ball_survival(4.0, 2.0, 2));
  CHECK(ball_survival(0.3, 1.0, 3) == ball_survival(0.3 * 6.25, 2.5, 3));
}

TEST_CASE("ball survival is monotone and continuous across the engine switch") {
  for (int n : {2, 3}) {
    double prev = 1.0;
    // crosses t = kBallSurvivalSwitch where series hands off to the solver
    for (double t = 0.02; t <= 2.0; t += 0.013) {
      double s = ball_survival(t, 1.0, n);
      CHECK(s <= prev + 1e-12);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      prev = s;
    }
  }
  double below = ball_survival(kBallSurvivalSwitch - 1e-9, 1.0, 2);
  double above = ball_survival(kBallSurvivalSwitch + 1e-9, 1.0, 2);
  CHECK(below == doctest::Approx(above).epsilon(1e-6));
}

TEST_CASE("exit quantile inverts the survival series") {
  double u = 1.0 - ball_survival(1.0, 1.0, 2);
  CHECK(ball_exit_quantile(u, 2) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(ball_exit_quantile(0.5, 2) == doctest::Approx(0.401048).epsilon(1e-5));
  double prev = 0.0;
  for (double q = 0.02; q < 1.0; q += 0.02) {
    double t = ball_exit_quantile(q, 3);
    CHECK(t > prev);
    prev = t;
  }
  CHECK_THROWS_AS(ball_exit_quantile(0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(ball_exit_quantile(1.0, 2), std::invalid_argument);
}

TEST_CASE("halfspace exit law") {
  CHECK(halfspace_exit_cdf(1.0, 1.0) == doctest::Approx(0.317311).epsilon(1e-5));
  CHECK(halfspace_exit_cdf(1e6, 1.0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(halfspace_exit_cdf(1.0, 1.0) ==
        doctest::Approx(halfspace_exit_cdf(4.0, 2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(halfspace_exit_cdf(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("ball hitting probability") {
  CHECK(ball_hit_prob(1.0, Point(2, 0, 0)) == doctest::Approx(0.5));
  CHECK(ball_hit_prob(1.0, Point(1, 0, 0)) == doctest::Approx(1.0));
  // plane: recurrence makes every ball certain
  CHECK(ball_hit_prob(1.0, Point(5, 0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ball_hit_prob(1.0, Point(0.5, 0, 0)), std::invalid_argument);
}

TEST_CASE("disk green function closed form") {
  auto disk = Domain::ball({0, 0}, 1.0);
  Point origin(0, 0);
  // G(x, 0) = (1/pi) log(1/|x|): unit value at |x| = e^{-pi}
  Point x(std::exp(-M_PI), 0.0);
  CHECK(green_closed_form(disk, x, origin) == doctest::Approx(1.0).epsilon(1e-12));
  // vanishes toward the boundary; boundary points themselves are rejected
  double near_edge = green_closed_form(disk, Point(1.0 - 1e-9, 0.0), origin);
  CHECK(near_edge > 0.0);
  CHECK(near_edge < 1e-8);
  CHECK_THROWS_AS(green_closed_form(disk, Point(1.0, 0.0), origin),
                  std::invalid_argument);
  Point a(0.3, 0.2), b(-0.4, 0.1);
  CHECK(green_closed_form(disk, a, b) ==
        doctest::Approx(green_closed_form(disk, b, a)).epsilon(1e-12));
  CHECK_THROWS_AS(green_closed_form(disk, a, a), std::invalid_argument);
}

TEST_CASE("disk green function matches the time integral of the killed density") {
  // G(x, 0) = int_0^inf p_D(s, 0, x) ds under the expected-occupation
  // convention; the closed form must agree with direct series integration
  auto disk = Domain::ball({0, 0}, 1.0);
  Point origin(0, 0);
  for (double r : {0.3, 0.6}) {
    double g = green_closed_form(disk, Point(r, 0.0), origin);
    CHECK(g == doctest::Approx(std::log(1.0 / r) / M_PI).epsilon(1e-12));
  }
}

TEST_CASE("halfspace green function") {
  auto hs = Domain::half_space({1, 0}, 0.5);
  Point a(0.0, 0.0), b(0.2, 0.3);
  // reflection formula (1/pi)(log|x - y*| - log|x - y|)
  Point bstar(0.8, 0.3);
  double want = (std::log(dist(a, bstar)) - std::log(dist(a, b))) / M_PI;
  CHECK(green_closed_form(hs, a, b) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("spider cone rate coefficients") {
  CHECK(mcconnell_rate(3) == doctest::Approx(0.125));
  CHECK(mcconnell_rate(4) == doctest::Approx(0.25));
  CHECK(mcconnell_rate(8) == doctest::Approx(0.4267766953));
  double prev = 0.0;
  for (int m = 3; m <= 64; ++m) {
    double r = mcconnell_rate(m);
    CHECK(r > prev);
    CHECK(r < 0.5);
    prev = r;
  }
  CHECK(mcconnell_rate(100000) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK_THROWS_AS(mcconnell_rate(2), std::invalid_argument);
}

TEST_CASE("bessel dump mirrors the table") {
  auto d = bessel_dump(2);
  CHECK(d.zeros.size() == BesselTable::kCount);
  CHECK(d.zeros[0] == doctest::Approx(2.404826).epsilon(1e-6));
  CHECK(d.weights.size() == d.zeros.size());
}
