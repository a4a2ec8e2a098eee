#include "iins/equilibrium.hpp"

#include <cmath>
#include <stdexcept>

namespace iins {

PotentialSpec make_uniform_gravity(const Grid& grid, double g, double offset) {
  if (!(g > 0.0)) throw std::invalid_argument("make_uniform_gravity: g must be > 0");
  return make_potential(grid, [g, offset](double, double z) { return g * z + offset; });
}

PotentialSpec make_potential(const Grid& grid,
                             const std::function<double(double, double)>& f) {
  PotentialSpec pot;
  pot.f = ScalarField(grid, Stagger::Center);
  for (int k = 0; k < grid.nz; ++k)
    for (int i = 0; i < grid.nx; ++i) pot.f.v(i, k) = f(grid.xc(i), grid.zc(k));
  if (pot.f.v.minCoeff() <= 0.0)
    throw std::invalid_argument("make_potential: f must be positive everywhere");
  pot.gradf = grad(pot.f);
  return pot;
}

void mean_shift(ScalarField& s) {
  double mean = 0.0;
  for (int k = 0; k < s.v.cols(); ++k) mean += s.v.col(k).sum();
  mean /= double(s.v.size());
  s.v -= mean;
}

VectorField rho_on_faces(const ScalarField& rho) {
  const Grid& g = *rho.g;
  VectorField rf(g);
  for (int k = 0; k < g.nz; ++k) {
    rf.u1(0, k) = 0.5 * (rho.v(0, k) + rho.v(g.nx - 1, k));
    for (int i = 1; i < g.nx; ++i) rf.u1(i, k) = 0.5 * (rho.v(i, k) + rho.v(i - 1, k));
  }
  rf.u2.col(0) = rho.v.col(0);
  for (int k = 1; k < g.nz; ++k) rf.u2.col(k) = 0.5 * (rho.v.col(k) + rho.v.col(k - 1));
  rf.u2.col(g.nz) = rho.v.col(g.nz - 1);
  return rf;
}

namespace {

/// p built columnwise so that (p(k)-p(k-1))/dz == -rho_face*(f(k)-f(k-1))/dz
/// exactly; columns are tied together along the k=0 row the same way.
ScalarField discrete_hydrostatic_pressure(const ScalarField& rho_s,
                                          const PotentialSpec& pot) {
  const Grid& g = *rho_s.g;
  ScalarField p(g, Stagger::Center);
  p.v(0, 0) = 0.0;
  for (int i = 1; i < g.nx; ++i) {
    double rf = 0.5 * (rho_s.v(i, 0) + rho_s.v(i - 1, 0));
    p.v(i, 0) = p.v(i - 1, 0) - rf * (pot.f.v(i, 0) - pot.f.v(i - 1, 0));
  }
  for (int k = 1; k < g.nz; ++k) {
    for (int i = 0; i < g.nx; ++i) {
      double rf = 0.5 * (rho_s.v(i, k) + rho_s.v(i, k - 1));
      p.v(i, k) = p.v(i, k - 1) - rf * (pot.f.v(i, k) - pot.f.v(i, k - 1));
    }
  }
  mean_shift(p);
  return p;
}

}  // namespace

EquilibriumProfile make_linear_profile(const PotentialSpec& pot, double gamma,
                                       double beta, double alpha1) {
  if (!(gamma > 0.0)) throw std::invalid_argument("make_linear_profile: gamma must be > 0");
  const Grid& g = *pot.f.g;
  EquilibriumProfile prof;
  prof.rho_s = ScalarField(g, Stagger::Center);
  prof.rho_s.v = -gamma * pot.f.v + beta;
  if (prof.rho_s.v.minCoeff() < alpha1)
    throw std::invalid_argument("make_linear_profile: profile not bounded below by alpha1");
  // For linear rho_s the analytic pressure gamma f^2/2 - beta f satisfies the
  // face stencil exactly (arithmetic face mean is exact for a linear F).
  prof.p_s = ScalarField(g, Stagger::Center);
  prof.p_s.v = 0.5 * gamma * pot.f.v.square() - beta * pot.f.v;
  mean_shift(prof.p_s);
  prof.slope = ScalarField(g, Stagger::Center);
  prof.slope.v.setConstant(-gamma);
  prof.linear = true;
  prof.gamma = gamma;
  prof.beta = beta;
  return prof;
}

EquilibriumProfile make_profile_of_f(const PotentialSpec& pot,
                                     const std::function<double(double)>& F,
                                     const std::function<double(double)>& dF,
                                     double alpha1) {
  const Grid& g = *pot.f.g;
  EquilibriumProfile prof;
  prof.rho_s = ScalarField(g, Stagger::Center);
  prof.slope = ScalarField(g, Stagger::Center);
  for (int k = 0; k < g.nz; ++k)
    for (int i = 0; i < g.nx; ++i) {
      prof.rho_s.v(i, k) = F(pot.f.v(i, k));
      prof.slope.v(i, k) = dF(pot.f.v(i, k));
    }
  if (prof.rho_s.v.minCoeff() <= 0.0)
    throw std::invalid_argument("make_profile_of_f: F(f) must be positive");
  if (prof.rho_s.v.minCoeff() < alpha1)
    throw std::invalid_argument("make_profile_of_f: F(f) below alpha1");
  prof.p_s = discrete_hydrostatic_pressure(prof.rho_s, pot);
  return prof;
}

double balance_residual_inf(const EquilibriumProfile& prof, const PotentialSpec& pot) {
  VectorField gp = grad(prof.p_s);
  VectorField rf = rho_on_faces(prof.rho_s);
  const Grid& g = *prof.p_s.g;
  double res = 0.0, scale = 0.0;
  for (int k = 0; k < g.nz; ++k)
    for (int i = 0; i < g.nx; ++i) {
      double b = rf.u1(i, k) * pot.gradf.u1(i, k);
      res = std::max(res, std::abs(gp.u1(i, k) + b));
      scale = std::max(scale, std::abs(b));
    }
  for (int k = 1; k < g.nz; ++k)
    for (int i = 0; i < g.nx; ++i) {
      double b = rf.u2(i, k) * pot.gradf.u2(i, k);
      res = std::max(res, std::abs(gp.u2(i, k) + b));
      scale = std::max(scale, std::abs(b));
    }
  return (scale > 0.0) ? res / scale : res;
}

HydrostaticCheck verify_hydrostatic(const VectorField& u, const ScalarField& rho,
                                    const ScalarField& P, const PotentialSpec& pot,
                                    double nu, double tol) {
  HydrostaticCheck out;
  out.velocity_norm = l2_norm(u);
  VectorField lap = laplacian_vec(u);
  VectorField gp = grad(P);
  VectorField rf = rho_on_faces(rho);
  VectorField resid(*u.g, u.bc);
  resid.u1 = nu * lap.u1 - gp.u1 - rf.u1 * pot.gradf.u1;
  resid.u2 = nu * lap.u2 - gp.u2 - rf.u2 * pot.gradf.u2;
  // Wall z-faces carry no momentum equation.
  resid.zero_wall_normal();
  out.balance_residual = l2_norm(resid);
  out.is_equilibrium = (out.velocity_norm <= tol) && (out.balance_residual <= tol);
  return out;
}

}  // namespace iins
