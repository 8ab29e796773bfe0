#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "exitlab/rng.hpp"

using exitlab::rng::Philox;

TEST_CASE("philox 4x32-10 known answers") {
  // reference vectors from the original SC11 distribution
  auto z = Philox::block({0, 0, 0, 0}, {0, 0});
  CHECK(z[0] == 0x6627e8d5u);
  CHECK(z[1] == 0xe169c58du);
  CHECK(z[2] == 0xbc57ac4cu);
  CHECK(z[3] == 0x9b00dbd8u);

  auto f = Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu});
  CHECK(f[0] == 0x408f276du);
  CHECK(f[1] == 0x41c83b0eu);
  CHECK(f[2] == 0xa20bc7c6u);
  CHECK(f[3] == 0x6d5451fdu);

  auto p = Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                         {0xa4093822u, 0x299f31d0u});
  CHECK(p[0] == 0xd16cfe09u);
  CHECK(p[1] == 0x94fdccebu);
  CHECK(p[2] == 0x5001e420u);
  CHECK(p[3] == 0x24126ea1u);
}

TEST_CASE("substreams are pure functions of (seed, stream)") {
  Philox a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == b.next_u32());

  // different stream, same seed: decorrelated output
  Philox c(42, 8);
  int same = 0;
  Philox a2(42, 7);
  for (int i = 0; i < 64; ++i) same += (a2.next_u32() == c.next_u32());
  CHECK(same <= 1);
}

TEST_CASE("unit draws stay strictly inside (0,1)") {
  Philox g(1, 0);
  double mn = 1.0, mx = 0.0, sum = 0.0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    double u = g.next_unit();
    mn = std::min(mn, u);
    mx = std::max(mx, u);
    sum += u;
  }
  CHECK(mn > 0.0);
  CHECK(mx < 1.0);
  CHECK(sum / N == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("gaussian moments") {
  Philox g(3, 11);
  const int N = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < N; ++i) {
    double x = g.next_gaussian();
    s1 += x;
    s2 += x * x;
    s4 += x * x * x * x;
  }
  CHECK(s1 / N == doctest::Approx(0.0).epsilon(0.02));
  CHECK(std::fabs(s1 / N) < 0.02);
  CHECK(s2 / N == doctest::Approx(1.0).epsilon(0.02));
  CHECK(s4 / N == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("sphere directions are unit and mean-free") {
  Philox g(9, 2);
  for (int n : {2, 3}) {
    double sx = 0, sy = 0, sz = 0;
    const int N = 100000;
    for (int i = 0; i < N; ++i) {
      auto d = g.next_direction(n);
      double r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
      CHECK(r2 == doctest::Approx(1.0).epsilon(1e-12));
      if (n == 2) CHECK(d[2] == 0.0);
      sx += d[0];
      sy += d[1];
      sz += d[2];
    }
    CHECK(std::fabs(sx / N) < 0.02);
    CHECK(std::fabs(sy / N) < 0.02);
    CHECK(std::fabs(sz / N) < 0.02);
  }
}
