#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace iins {

/// Normal-mode stability problem for the linearized buoyancy system on the
/// channel with free-slip walls. Profiles are sampled at the nz_modes+1
/// z-nodes j*h/nz_modes. Sign convention: d(varrho)/dt = -delta(z) u.grad f,
/// so delta > 0 somewhere means Rayleigh-Taylor forcing (delta = d rho_s/df).
struct StabilityProblem {
  int nz_modes = 64;
  double k = 1.0;   // x-wavenumber
  double nu = 1e-3;
  double g = 1.0;   // grad f = (0, g)
  double h = 1.0;
  Eigen::VectorXd rho_s;  // nz_modes+1 node samples, >= alpha1 > 0
  Eigen::VectorXd delta;  // nz_modes+1 node samples
};

struct AssembledProblem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  int n_psi = 0;  // interior stream-function nodes; r block has the same size
  double dz = 0.0;
};

struct StabilityResult {
  double k = 0.0;
  std::complex<double> Lambda{0.0, 0.0};
  Eigen::VectorXcd psi;       // interior nodes
  Eigen::VectorXcd mode_u1;   // d(psi)/dz at nodes 0..N
  Eigen::VectorXcd mode_u2;   // -i k psi at nodes 0..N
  Eigen::VectorXcd mode_rho;  // varrho-hat at nodes 0..N
  double variational_residual = 0.0;
  bool converged = false;
};

/// Stream-function formulation, pressure eliminated: A v = Lambda B v with
/// v = (psi interior, r interior), psi = psi'' = 0 at the walls.
AssembledProblem assemble(const StabilityProblem& p);

/// Eigenpair with largest Re(Lambda) among modes with nontrivial velocity;
/// deterministic ordering by (Re, Im).
StabilityResult growth_rate(const StabilityProblem& p);

std::vector<StabilityResult> dispersion_scan(const StabilityProblem& tmpl,
                                             const std::vector<double>& k_list);

}  // namespace iins
