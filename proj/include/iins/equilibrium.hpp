#pragma once

#include <functional>

#include "iins/grid.hpp"
#include "iins/operators.hpp"

namespace iins {

/// Gravitational potential f > 0 with its discrete gradient on faces.
struct PotentialSpec {
  ScalarField f;       // cell centers
  VectorField gradf;   // faces, equal to grad(f) by construction
  double g = 0.0;      // gravity strength when f = g*z (+offset), else 0
};

/// Uniform gravity f = g*z + offset; offset keeps f > 0 on the grid.
PotentialSpec make_uniform_gravity(const Grid& grid, double g, double offset = 1.0);

/// Arbitrary potential sampled at cell centers; gradf is built discretely.
PotentialSpec make_potential(const Grid& grid, const std::function<double(double, double)>& f);

/// Hydrostatic profile: density, pressure, and slope s = d(rho_s)/df.
struct EquilibriumProfile {
  ScalarField rho_s;
  ScalarField p_s;
  ScalarField slope;
  bool linear = false;
  double gamma = 0.0;  // set when linear: rho_s = -gamma*f + beta
  double beta = 0.0;

  bool rt_unstable() const { return slope.v.maxCoeff() > 0.0; }
};

/// rho_s = -gamma*f + beta, p_s built by a discrete z-antiderivative so
/// that grad(p_s) = -rho_s_face * gradf on faces to roundoff; mean(p_s)=0.
EquilibriumProfile make_linear_profile(const PotentialSpec& pot, double gamma,
                                       double beta, double alpha1 = 1e-12);

/// rho_s = F(f), slope = dF(f); p_s from the same discrete antiderivative.
EquilibriumProfile make_profile_of_f(const PotentialSpec& pot,
                                     const std::function<double(double)>& F,
                                     const std::function<double(double)>& dF,
                                     double alpha1 = 1e-12);

struct HydrostaticCheck {
  double velocity_norm = 0.0;
  double balance_residual = 0.0;
  bool is_equilibrium = false;
};

/// Momentum residual ||nu*lap(u) - grad(P) - rho*gradf||_{L2} and ||u||_{L2}.
HydrostaticCheck verify_hydrostatic(const VectorField& u, const ScalarField& rho,
                                    const ScalarField& P, const PotentialSpec& pot,
                                    double nu, double tol);

/// rho averaged from centers onto faces (arithmetic mean); wall rows hold the
/// adjacent cell value.
VectorField rho_on_faces(const ScalarField& rho);

/// Max-norm of grad(p_s) + rho_face*gradf over faces (well-balance residual).
double balance_residual_inf(const EquilibriumProfile& prof, const PotentialSpec& pot);

void mean_shift(ScalarField& s);

}  // namespace iins
