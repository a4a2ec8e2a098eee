#include "iins/linstab.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace iins {

namespace {

/// S = -(D^2 - k^2) on interior nodes with zero Dirichlet data. Applying it
/// twice realizes (D^2 - k^2)^2 with psi = psi'' = 0 at the walls.
Eigen::MatrixXd stokes_op(int n, double dz, double k) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  double idz2 = 1.0 / (dz * dz);
  for (int j = 0; j < n; ++j) {
    S(j, j) = 2.0 * idz2 + k * k;
    if (j > 0) S(j, j - 1) = -idz2;
    if (j + 1 < n) S(j, j + 1) = -idz2;
  }
  return S;
}

}  // namespace

AssembledProblem assemble(const StabilityProblem& p) {
  const int N = p.nz_modes;
  if (N < 4) throw std::invalid_argument("assemble: nz_modes must be >= 4");
  if (p.rho_s.size() != N + 1 || p.delta.size() != N + 1)
    throw std::invalid_argument("assemble: profile sample count must be nz_modes+1");
  if (p.rho_s.minCoeff() <= 0.0)
    throw std::invalid_argument("assemble: rho_s must be positive");
  if (p.k <= 0.0) throw std::invalid_argument("assemble: k must be positive");

  const int n = N - 1;  // interior nodes
  const double dz = p.h / N;
  const double idz2 = 1.0 / (dz * dz);

  Eigen::MatrixXd S = stokes_op(n, dz, p.k);

  // B1 = k^2 diag(rho) - d/dz(rho d/dz .), half-node densities by averaging.
  Eigen::MatrixXd B1 = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    int node = j + 1;
    double rlo = 0.5 * (p.rho_s(node - 1) + p.rho_s(node));
    double rhi = 0.5 * (p.rho_s(node) + p.rho_s(node + 1));
    B1(j, j) = p.k * p.k * p.rho_s(node) + (rlo + rhi) * idz2;
    if (j > 0) B1(j, j - 1) = -rlo * idz2;
    if (j + 1 < n) B1(j, j + 1) = -rhi * idz2;
  }

  AssembledProblem out;
  out.n_psi = n;
  out.dz = dz;
  out.A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  out.B = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  out.A.topLeftCorner(n, n) = -p.nu * S * S;
  out.A.topRightCorner(n, n) = p.k * p.g * Eigen::MatrixXd::Identity(n, n);
  for (int j = 0; j < n; ++j) out.A(n + j, j) = p.k * p.g * p.delta(j + 1);
  out.B.topLeftCorner(n, n) = B1;
  out.B.bottomRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  return out;
}

StabilityResult growth_rate(const StabilityProblem& p) {
  AssembledProblem ap = assemble(p);
  const int n = ap.n_psi;
  const int N = p.nz_modes;

  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
  ges.compute(ap.A, ap.B, true);
  if (ges.info() != Eigen::Success)
    throw std::runtime_error("growth_rate: eigensolver failed");

  StabilityResult res;
  res.k = p.k;
  res.converged = true;

  // Largest Re(Lambda) over modes with nontrivial velocity part; ties broken
  // by larger Im so the pick is deterministic.
  int best = -1;
  std::complex<double> best_lam(-1e300, 0.0);
  Eigen::VectorXcd alphas = ges.alphas();
  Eigen::VectorXd betas = ges.betas();
  auto evecs = ges.eigenvectors();
  for (int j = 0; j < 2 * n; ++j) {
    if (std::abs(betas(j)) < 1e-14 * std::abs(alphas(j)) + 1e-300) continue;
    std::complex<double> lam = alphas(j) / betas(j);
    if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag())) continue;
    Eigen::VectorXcd v = evecs.col(j);
    double psi_part = v.head(n).norm();
    if (psi_part < 1e-8 * v.norm()) continue;  // pure density mode, u = 0
    if (best < 0 || lam.real() > best_lam.real() + 1e-14 * std::abs(best_lam.real()) ||
        (std::abs(lam.real() - best_lam.real()) <=
             1e-12 * (1.0 + std::abs(best_lam.real())) &&
         lam.imag() > best_lam.imag())) {
      best = j;
      best_lam = lam;
    }
  }
  if (best < 0) throw std::runtime_error("growth_rate: no velocity mode found");

  res.Lambda = best_lam;
  Eigen::VectorXcd v = evecs.col(best);
  Eigen::VectorXcd psi = v.head(n);
  // Normalize so max |psi| = 1 with the max entry real positive.
  int imax = 0;
  psi.cwiseAbs().maxCoeff(&imax);
  psi /= psi(imax);
  Eigen::VectorXcd r = v.tail(n) / v(imax);
  res.psi = psi;

  // Variational identity, evaluated with the assembled bilinear forms:
  // Lambda^2 <psi, B1 psi> + Lambda nu ||S psi||^2 - k^2 g^2 <delta psi, psi> = 0.
  {
    Eigen::MatrixXd S = stokes_op(n, ap.dz, p.k);
    Eigen::MatrixXcd B1 = ap.B.topLeftCorner(n, n);
    std::complex<double> qb = (psi.adjoint() * (B1 * psi))(0);
    std::complex<double> qs = (S * psi).squaredNorm();
    std::complex<double> qd = 0.0;
    for (int j = 0; j < n; ++j) qd += p.delta(j + 1) * std::norm(psi(j));
    std::complex<double> lam = res.Lambda;
    std::complex<double> expr =
        lam * lam * qb + lam * p.nu * qs - p.k * p.k * p.g * p.g * qd;
    double scale = std::abs(lam * lam * qb) + std::abs(lam * p.nu * qs) +
                   std::abs(p.k * p.k * p.g * p.g * qd);
    res.variational_residual = std::abs(expr) / std::max(scale, 1e-300);
  }

  // Node profiles incl. walls; varrho-hat = i r under the real substitution.
  res.mode_u1 = Eigen::VectorXcd::Zero(N + 1);
  res.mode_u2 = Eigen::VectorXcd::Zero(N + 1);
  res.mode_rho = Eigen::VectorXcd::Zero(N + 1);
  const std::complex<double> I(0.0, 1.0);
  auto psi_at = [&](int node) -> std::complex<double> {
    if (node <= 0 || node >= N) return 0.0;
    return psi(node - 1);
  };
  for (int node = 0; node <= N; ++node) {
    // one-sided ghost psi(-1) = -psi(1) keeps psi'' = 0 at the walls
    std::complex<double> lo = (node == 0) ? -psi_at(1) : psi_at(node - 1);
    std::complex<double> hi = (node == N) ? -psi_at(N - 1) : psi_at(node + 1);
    res.mode_u1(node) = (hi - lo) / (2.0 * ap.dz);
    res.mode_u2(node) = -I * p.k * psi_at(node);
    if (node >= 1 && node <= N - 1) res.mode_rho(node) = I * r(node - 1);
  }
  return res;
}

std::vector<StabilityResult> dispersion_scan(const StabilityProblem& tmpl,
                                             const std::vector<double>& k_list) {
  std::vector<StabilityResult> out;
  out.reserve(k_list.size());
  StabilityProblem p = tmpl;
  for (double k : k_list) {
    p.k = k;
    try {
      out.push_back(growth_rate(p));
    } catch (const std::exception&) {
      StabilityResult fail;
      fail.k = k;
      fail.converged = false;
      fail.Lambda = {std::numeric_limits<double>::quiet_NaN(), 0.0};
      fail.variational_residual = std::numeric_limits<double>::infinity();
      out.push_back(std::move(fail));
    }
  }
  return out;
}

}  // namespace iins
