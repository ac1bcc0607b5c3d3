#include <gtest/gtest.h>

#include <cmath>

#include "capkit/multidim.hpp"

using namespace capkit;

namespace {
const double pi2 = pi * pi;
const std::vector<cplx> origin{0.0, 0.0};
}  // namespace

TEST(Multidim, KernelGapExamples) {
  EXPECT_NEAR(lemma_de_gap(MultiDomain::ball(origin, 1.0), origin), 0.0, 1e-12);
  EXPECT_NEAR(lemma_de_gap(MultiDomain::polydisc(origin, {1.0, 1.0}), origin), 1.0 / pi2, 1e-12);
}

TEST(Multidim, IndicatrixExamples) {
  const auto ball = azukawa_volume(MultiDomain::ball(origin, 1.0), origin);
  EXPECT_NEAR(ball.volume, pi2 / 2.0, 1e-12);
  EXPECT_NEAR(ball.gap, 0.0, 1e-12);
  const auto bidisc = azukawa_volume(MultiDomain::polydisc(origin, {1.0, 1.0}), origin);
  EXPECT_NEAR(bidisc.volume, pi2, 1e-12);
  EXPECT_NEAR(bidisc.gap, pi2 / 2.0, 1e-12);
  EXPECT_NEAR(delta_c_gap(MultiDomain::polydisc(origin, {1.0, 1.0}), origin), pi2 / 2.0, 1e-12);
}

TEST(Multidim, LowerBoundGapVanishesAtCenters) {
  EXPECT_NEAR(bz_lower_bound_gap(MultiDomain::ball(origin, 1.0), origin), 0.0, 1e-12);
  EXPECT_NEAR(bz_lower_bound_gap(MultiDomain::polydisc(origin, {1.0, 1.0}), origin), 0.0, 1e-12);
  EXPECT_NEAR(bz_lower_bound_gap(MultiDomain::polydisc({1.0, 0.0, 0.0}, {1.0, 2.0, 0.5}), {1.0, 0.0, 0.0}), 0.0,
              1e-12);
}

TEST(Multidim, ScaledBallIsExtremal) {
  const std::vector<cplx> c{cplx(1.0, 2.0), cplx(-1.0, 0.5), 0.0};
  const auto ball = MultiDomain::ball(c, 2.5);
  EXPECT_NEAR(lemma_de_gap(ball, c) / kernel_at(ball, c), 0.0, 1e-12);
  EXPECT_NEAR(delta_c_gap(ball, c) / azukawa_volume(ball, c).volume, 0.0, 1e-12);
}

TEST(MultidimProperty, KernelGapNonnegativeOffCenter) {
  const auto ball = MultiDomain::ball(origin, 1.0);
  const auto bidisc = MultiDomain::polydisc(origin, {1.0, 1.0});
  for (int i = 1; i < 20; ++i) {
    const std::vector<cplx> z{std::polar(0.03 * i, 0.4 * i), std::polar(0.02 * i, -0.3 * i)};
    EXPECT_GE(lemma_de_gap(ball, z), 0.0);
    EXPECT_GE(lemma_de_gap(bidisc, z), 0.0);
  }
}

TEST(Multidim, OffCenterIndicatrixHasNoClosedForm) {
  try {
    azukawa_volume(MultiDomain::ball(origin, 1.0), {0.1, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoClosedForm);
  }
  try {
    kernel_at(MultiDomain::ball(origin, 1.0), {1.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::PointOutsideDomain);
  }
}
