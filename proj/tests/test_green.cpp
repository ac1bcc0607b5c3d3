#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "capkit/green.hpp"

using namespace capkit;

namespace {

// Green's function of the unit disc with pole p via the Moebius map.
double moebius_green(cplx p, cplx z) { return std::log(std::abs((z - p) / (1.0 - std::conj(p) * z))); }

// {G_p < t} on the unit disc is the disc with this centre and radius.
std::pair<cplx, double> moebius_level_disc(cplx p, double t) {
  const double s = std::exp(t), a2 = std::norm(p);
  return {p * (1.0 - s * s) / (1.0 - s * s * a2), s * (1.0 - a2) / (1.0 - s * s * a2)};
}

PlanarDomain unit_square() { return PlanarDomain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return Errc::ChainViolation;
}

}  // namespace

TEST(Green, DiscSolveMatchesMoebiusOracle) {
  const SolverConfig cfg;
  for (cplx p : {cplx(0.0), cplx(0.5), cplx(-0.3, 0.6)}) {
    const auto sol = solve(PlanarDomain::disc(0.0, 1.0), p, cfg);
    EXPECT_LE(sol.residual(), cfg.defect_tolerance);
    for (int k = 0; k < 40; ++k) {
      const cplx z = std::polar(0.95 * (k + 0.5) / 40.0, 2.1 * k);
      if (std::abs(z - p) < 1e-6) continue;
      EXPECT_NEAR(sol.value(z), moebius_green(p, z), 1e-6);
    }
  }
}

TEST(Green, DiscClosedFormMatchesMoebius) {
  const auto sol = disc_oracle(0.0, 1.0, {0.2, -0.4});
  for (int k = 0; k < 20; ++k) {
    const cplx z = std::polar(0.9 * k / 20.0, 1.3 * k);
    EXPECT_NEAR(sol.value(z), moebius_green({0.2, -0.4}, z), 1e-14);
  }
  // Scaled disc: G on disc(c, R) at c + R w equals the unit-disc value at w.
  const auto big = disc_oracle({1.0, 1.0}, 3.0, {1.0, 1.0 + 1.5});
  EXPECT_NEAR(big.value({1.0 + 0.9, 1.0}), moebius_green({0.0, 0.5}, 0.3), 1e-14);
}

TEST(Green, CapacityOfDiscs) {
  const SolverConfig cfg;
  // c(p) = 1 / (R (1 - |q|^2)) with q = (p - center) / R.
  EXPECT_NEAR(capacity_robin(solve(PlanarDomain::disc(0.0, 1.0), 0.0, cfg)), 1.0, 1e-7);
  EXPECT_NEAR(capacity_robin(solve(PlanarDomain::disc(0.0, 1.0), 0.5, cfg)), 1.0 / 0.75, 1e-6);
  EXPECT_NEAR(capacity_robin(solve(PlanarDomain::disc({1.0, 0.0}, 2.0), {1.5, 0.0}, cfg)),
              1.0 / (2.0 * (1.0 - 0.0625)), 1e-7);
  EXPECT_NEAR(capacity_robin(disc_oracle(0.0, 2.0, 0.0)), 0.5, 1e-15);
}

TEST(Green, CapacityCircleMeanAgreesWithRobin) {
  const SolverConfig cfg;
  const std::pair<PlanarDomain, cplx> cases[] = {{PlanarDomain::disc(0.0, 1.0), 0.5},
                                                 {PlanarDomain::ellipse(0.0, 2.0, 1.0), 0.0},
                                                 {PlanarDomain::annulus(0.0, 0.2, 1.0), 0.5}};
  for (const auto& [domain, pole] : cases) {
    const auto sol = solve(domain, pole, cfg);
    const double c = capacity_robin(sol);
    const double delta = domain.boundary_distance(pole);
    for (double frac : {0.2, 0.5, 0.8}) EXPECT_NEAR(capacity_circle_mean(sol, frac * delta), c, 1e-5);
  }
}

TEST(Green, ErrorsCarryCodes) {
  const SolverConfig cfg;
  const auto disc = PlanarDomain::disc(0.0, 1.0);
  EXPECT_EQ(code_of([&] { solve(disc, 1.5, cfg); }), Errc::PoleOutsideDomain);
  const auto sol = solve(disc, 0.0, cfg);
  EXPECT_EQ(code_of([&] { sol.evaluate(0.0); }), Errc::PoleEvaluation);
  EXPECT_EQ(code_of([&] { sol.evaluate(2.0); }), Errc::PointOutsideDomain);
  EXPECT_EQ(code_of([&] { capacity_circle_mean(sol, 1.0); }), Errc::RadiusTooLarge);
  EXPECT_EQ(code_of([&] { capacity_circle_mean(sol, -0.1); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([&] { sublevel_profile(sol, {0.5}, cfg); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([&] { sublevel_profile(sol, {-1.0, -2.0}, cfg); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([&] { sublevel_profile(sol, {-60.0}, cfg); }), Errc::ContourNotFound);
  SolverConfig tight = cfg;
  tight.collocation_nodes = 16;
  tight.defect_tolerance = 1e-14;
  EXPECT_EQ(code_of([&] { solve(unit_square(), {0.5, 0.5}, tight); }), Errc::SolveFailed);
  SolverConfig bad = cfg;
  bad.source_offset = 0.0;
  EXPECT_EQ(code_of([&] { solve(disc, 0.0, bad); }), Errc::InvalidArgument);
}

TEST(Green, CenteredDiscProfileExample) {
  const SolverConfig cfg;
  const auto sol = solve(PlanarDomain::disc(0.0, 1.0), 0.0, cfg);
  const auto prof = sublevel_profile(sol, {-1.1, -1.05, -1.0, -0.95, -0.9}, cfg);
  const auto& l = prof.levels[2];
  EXPECT_NEAR(l.volume / (pi * std::exp(-2.0)) - 1.0, 0.0, 1e-6);
  EXPECT_NEAR(l.sigma / (two_pi * std::exp(-1.0)) - 1.0, 0.0, 1e-6);
  EXPECT_NEAR(l.flux, two_pi, 1e-5);
  EXPECT_NEAR(l.f, 1.0, 1e-6);
  EXPECT_NEAR(l.inverse_flux / (two_pi * std::exp(-2.0)) - 1.0, 0.0, 1e-5);
  EXPECT_NEAR(l.dvol_dt / (two_pi * std::exp(-2.0)) - 1.0, 0.0, 1e-4);
  EXPECT_TRUE(l.reliable);
}

TEST(Green, OffsetPoleProfileMatchesMoebiusLevelDiscs) {
  const SolverConfig cfg;
  const cplx p(0.3, 0.4);
  const auto sol = solve(PlanarDomain::disc(0.0, 1.0), p, cfg);
  const auto prof = sublevel_profile(sol, {-3.0, -1.0, -0.2}, cfg);
  for (const auto& l : prof.levels) {
    const auto [c, r] = moebius_level_disc(p, l.t);
    (void)c;
    EXPECT_NEAR(l.volume / (pi * r * r) - 1.0, 0.0, 1e-5) << l.t;
    EXPECT_NEAR(l.sigma / (two_pi * r) - 1.0, 0.0, 1e-5) << l.t;
    EXPECT_NEAR(l.flux, two_pi, 1e-4) << l.t;
    EXPECT_LE(std::abs(l.volume - l.vol_mc), 4.0 * l.vol_mc_stderr + l.volume_tolerance) << l.t;
  }
}

TEST(GreenProperty, NegativeInsideTheDomain) {
  const SolverConfig cfg;
  const std::pair<PlanarDomain, cplx> cases[] = {{unit_square(), {0.3, 0.7}},
                                                 {PlanarDomain::annulus(0.0, 0.2, 1.0), {0.0, -0.6}},
                                                 {PlanarDomain::fourier({0.15, 0.0, 0.0, 1.0, 0.0}), 0.1}};
  for (const auto& [domain, pole] : cases) {
    const auto sol = solve(domain, pole, cfg);
    EXPECT_LT(max_interior_value(sol, 1000, 3), 0.0) << domain.kind();
  }
}

// G_p(q) = G_q(p) up to the boundary defects of the two solves.
TEST(GreenProperty, Symmetry) {
  const SolverConfig cfg;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const auto sq = unit_square();
  for (int i = 0; i < 6; ++i) {
    const cplx p(u(rng), u(rng)), q(u(rng), u(rng));
    const auto gp = solve(sq, p, cfg), gq = solve(sq, q, cfg);
    EXPECT_NEAR(gp.value(q), gq.value(p), 2.0 * (gp.residual() + gq.residual()) + 1e-12);
  }
}

// A subdomain has the larger Green's function (domain monotonicity).
TEST(GreenProperty, DomainMonotonicity) {
  const SolverConfig cfg;
  const cplx p(0.5, 0.5);
  const auto inner = solve(PlanarDomain::disc(p, 0.5), p, cfg);
  const auto outer = solve(unit_square(), p, cfg);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> r(0.01, 0.49), th(0.0, two_pi);
  for (int i = 0; i < 500; ++i) {
    const cplx z = p + std::polar(r(rng), th(rng));
    EXPECT_GE(inner.value(z), outer.value(z) - inner.residual() - outer.residual());
  }
  EXPECT_LE(capacity_robin(outer), capacity_robin(inner));
}

TEST(GreenProperty, ProfileIsSeedDeterministic) {
  SolverConfig cfg;
  cfg.seed = 42;
  const auto sol = solve(unit_square(), {0.4, 0.6}, cfg);
  const auto a = sublevel_profile(sol, {-2.0, -1.0}, cfg);
  const auto b = sublevel_profile(sol, {-2.0, -1.0}, cfg);
  for (std::size_t i = 0; i < a.levels.size(); ++i) {
    EXPECT_EQ(a.levels[i].vol_mc, b.levels[i].vol_mc);
    EXPECT_EQ(a.levels[i].volume, b.levels[i].volume);
  }
}
