#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "iins/equilibrium.hpp"

using namespace iins;

TEST_CASE("uniform gravity potential: f > 0 and gradf is the discrete gradient") {
  Grid g(16, 32, 1.0, 1.0);
  PotentialSpec pot = make_uniform_gravity(g, 2.0, 0.5);
  for (int k = 0; k < g.nz; ++k)
    for (int i = 0; i < g.nx; ++i)
      CHECK(pot.f(i, k) == doctest::Approx(0.5 + 2.0 * g.zc(k)).epsilon(1e-14));
  VectorField gf = grad(pot.f);
  CHECK((pot.gradf.u1 - gf.u1).abs().maxCoeff() == 0.0);
  CHECK((pot.gradf.u2 - gf.u2).abs().maxCoeff() == 0.0);
  // interior z-faces carry exactly g
  for (int k = 1; k < g.nz; ++k) CHECK(pot.gradf.u2(0, k) == doctest::Approx(2.0));
  CHECK_THROWS(make_potential(g, [](double, double) { return -1.0; }));
}

TEST_CASE("linear profile: f=z, gamma=1, beta=2 gives rho in [1,2], slope -1") {
  Grid g(8, 64, 1.0, 1.0);
  PotentialSpec pot = make_uniform_gravity(g, 1.0, 0.0);
  EquilibriumProfile pr = make_linear_profile(pot, 1.0, 2.0);
  CHECK(pr.linear);
  CHECK(pr.gamma == 1.0);
  CHECK(pr.rho_s.v.minCoeff() >= 1.0);
  CHECK(pr.rho_s.v.maxCoeff() <= 2.0);
  CHECK((pr.slope.v + 1.0).abs().maxCoeff() <= 1e-14);
  for (int k = 0; k < g.nz; ++k)
    CHECK(pr.rho_s(0, k) == doctest::Approx(2.0 - g.zc(k)).epsilon(1e-14));
  CHECK(std::abs(integrate(pr.p_s)) <= 1e-12);
  CHECK_FALSE(pr.rt_unstable());
}

TEST_CASE("linear profile: exact discrete balance, including near-zero gamma") {
  Grid g(8, 64, 1.0, 1.0);
  PotentialSpec pot = make_uniform_gravity(g, 1.0, 0.0);
  CHECK(balance_residual_inf(make_linear_profile(pot, 1.0, 2.0), pot) <= 1e-12);
  CHECK(balance_residual_inf(make_linear_profile(pot, 1e-9, 1.0), pot) <= 1e-10);
  CHECK_THROWS(make_linear_profile(pot, 5.0, 2.0));  // nonpositive density
}

TEST_CASE("balance residual property over random gamma, beta, g, grid sizes") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> dg(0.1, 10.0);
  for (int trial = 0; trial < 30; ++trial) {
    int nz = 16 << (trial % 3);
    Grid g(8, nz, 1.0, 1.0);
    double grav = dg(rng);
    double gamma = dg(rng);
    PotentialSpec pot = make_uniform_gravity(g, grav, 0.1);
    double fmax = 0.1 + grav;
    double beta = gamma * fmax + 0.5 + dg(rng);  // keeps rho >= 0.5
    EquilibriumProfile pr = make_linear_profile(pot, gamma, beta);
    CHECK(balance_residual_inf(pr, pot) <= 1e-10);
  }
}

TEST_CASE("profile of f: exponential density matches analytic antiderivative") {
  Grid g(8, 4096, 1.0, 1.0);
  PotentialSpec pot = make_uniform_gravity(g, 1.0, 0.0);
  auto F = [](double s) { return std::exp(-s); };
  auto dF = [](double s) { return -std::exp(-s); };
  EquilibriumProfile pr = make_profile_of_f(pot, F, dF);
  CHECK(balance_residual_inf(pr, pot) <= 1e-10);
  // p_s should match exp(-z) - mean to the discretization error of the
  // z-antiderivative (trapezoid, O(dz^2); nz=4096 puts it below 1e-8)
  double mean = (1.0 - std::exp(-1.0));  // int_0^1 exp(-z) dz
  double worst = 0.0;
  for (int k = 0; k < g.nz; ++k)
    worst = std::max(worst, std::abs(pr.p_s(0, k) - (std::exp(-g.zc(k)) - mean)));
  CHECK(worst <= 1e-8);
}

TEST_CASE("profile of f: constant density and unstable slope flagging") {
  Grid g(8, 64, 1.0, 1.0);
  PotentialSpec pot = make_uniform_gravity(g, 1.0, 0.0);
  EquilibriumProfile c = make_profile_of_f(pot, [](double) { return 1.0; },
                                           [](double) { return 0.0; });
  CHECK(c.slope.v.abs().maxCoeff() == 0.0);
  CHECK_FALSE(c.rt_unstable());
  // p_s = -f + mean shift
  for (int k = 1; k < g.nz; ++k)
    CHECK(c.p_s(0, k) - c.p_s(0, k - 1) == doctest::Approx(-g.dz).epsilon(1e-12));

  EquilibriumProfile u = make_profile_of_f(pot, [](double s) { return 1.0 + s; },
                                           [](double) { return 1.0; });
  CHECK(balance_residual_inf(u, pot) <= 1e-10);
  CHECK(u.rt_unstable());
  CHECK_THROWS(make_profile_of_f(pot, [](double s) { return s - 0.5; },
                                 [](double) { return 1.0; }));
}

TEST_CASE("profile of f agrees with make_linear_profile on linear data") {
  Grid g(8, 128, 1.0, 1.0);
  PotentialSpec pot = make_uniform_gravity(g, 1.0, 0.0);
  EquilibriumProfile a = make_linear_profile(pot, 0.7, 1.9);
  EquilibriumProfile b = make_profile_of_f(pot, [](double s) { return -0.7 * s + 1.9; },
                                           [](double) { return -0.7; });
  CHECK((a.rho_s.v - b.rho_s.v).abs().maxCoeff() <= 1e-12);
  CHECK((a.p_s.v - b.p_s.v).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("slope classification matches independent finite difference in z") {
  Grid g(8, 64, 1.0, 1.0);
  PotentialSpec pot = make_uniform_gravity(g, 2.0, 0.1);
  auto F = [](double s) { return 3.0 - 0.5 * s * s; };  // dF = -s < 0 on f > 0
  auto dF = [](double s) { return -s; };
  EquilibriumProfile pr = make_profile_of_f(pot, F, dF);
  for (int k = 1; k < g.nz - 1; ++k) {
    double fd = (pr.rho_s(0, k + 1) - pr.rho_s(0, k - 1)) / (2.0 * g.dz * 2.0);
    CHECK(std::signbit(fd) == std::signbit(pr.slope(0, k)));
  }
}

TEST_CASE("verify_hydrostatic: equilibrium accepted, wrong pressure rejected") {
  Grid g(16, 64, 1.0, 1.0);
  PotentialSpec pot = make_uniform_gravity(g, 1.0, 0.0);
  EquilibriumProfile pr = make_linear_profile(pot, 1.0, 2.0);
  VectorField u(g);
  ScalarField zero(g, Stagger::Center);

  HydrostaticCheck ok = verify_hydrostatic(u, pr.rho_s, pr.p_s, pot, 1e-2, 1e-9);
  CHECK(ok.is_equilibrium);
  CHECK(ok.velocity_norm == 0.0);

  HydrostaticCheck bad = verify_hydrostatic(u, pr.rho_s, zero, pot, 1e-2, 1e-9);
  CHECK_FALSE(bad.is_equilibrium);
  CHECK(bad.balance_residual > 0.1);

  VectorField moving(g);
  moving.u1.setConstant(1.0);
  HydrostaticCheck mv = verify_hydrostatic(moving, pr.rho_s, pr.p_s, pot, 1e-2, 1e-9);
  CHECK_FALSE(mv.is_equilibrium);
}
