#pragma once

#include <complex>
#include <vector>

#include "iins/grid.hpp"
#include "iins/operators.hpp"

namespace iins {

struct PoissonSolveReport {
  int iterations = 0;
  double final_residual = 0.0;  // relative
  double tolerance = 0.0;
  bool converged = true;
  bool rhs_mean_warning = false;
};

struct PoissonOptions {
  double tol = 1e-12;
  int max_iter = 10000;
};

/// Exact solver for the constant-coefficient Neumann/periodic problem
/// div(grad phi) = rhs, mean(phi) = 0; spectral in x, tridiagonal in z.
class ConstCoeffPoisson {
 public:
  explicit ConstCoeffPoisson(const Grid& g);
  /// Solves in place: phi gets the mean-zero solution.
  void solve(const Array2D& rhs, Array2D& phi) const;

 private:
  const Grid* g_;
  std::vector<double> lambda_;  // x-mode symbol of the periodic second difference
};

/// PCG solve of div(grad(phi)/rho_face) = rhs with mean(phi) = 0.
/// Preconditioner: the constant-coefficient solve scaled by mean(rho).
class VariablePoisson {
 public:
  explicit VariablePoisson(const Grid& g);
  ScalarField solve(const ScalarField& rho, const ScalarField& rhs,
                    const PoissonOptions& opt, PoissonSolveReport& report) const;
  /// Same solve with a caller-provided initial guess (mean-zero on return).
  ScalarField solve(const ScalarField& rho, const ScalarField& rhs,
                    const PoissonOptions& opt, PoissonSolveReport& report,
                    const Array2D* initial_guess) const;

 private:
  ConstCoeffPoisson cc_;
};

struct ProjectionResult {
  VectorField u;
  VectorField gradP;
  ScalarField phi;  // the pressure of the projected step, mean-zero
  PoissonSolveReport report;
};

/// u = u_star - dt * grad(phi)/rho_face with div(u) driven below tol.
ProjectionResult project(const VectorField& u_star, const ScalarField& rho,
                         double dt, const PoissonOptions& opt,
                         const Array2D* initial_guess = nullptr);

struct HelmholtzResult {
  VectorField w;   // divergence-free part, w.n = 0 at walls
  ScalarField q;   // mean-zero potential
};

/// v = w + grad q with dq/dn = v.n at walls; solved exactly by the
/// constant-coefficient spectral solver.
HelmholtzResult helmholtz_decompose(const VectorField& v);

}  // namespace iins
