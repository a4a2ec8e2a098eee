#include "iins/elliptic.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>

#include "iins/equilibrium.hpp"

namespace iins {

namespace {

double field_mean(const Array2D& a) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a.col(k).sum();
  return acc / double(a.size());
}

double dot2(const Array2D& a, const Array2D& b) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) acc += (a.col(k) * b.col(k)).sum();
  return acc;
}

}  // namespace

ConstCoeffPoisson::ConstCoeffPoisson(const Grid& g) : g_(&g) {
  lambda_.resize(g.nx);
  for (int j = 0; j < g.nx; ++j) {
    double s = std::sin(M_PI * j / double(g.nx));
    lambda_[j] = -4.0 * s * s / (g.dx * g.dx);
  }
}

void ConstCoeffPoisson::solve(const Array2D& rhs, Array2D& phi) const {
  const Grid& g = *g_;
  const int nx = g.nx, nz = g.nz;
  const double idz2 = 1.0 / (g.dz * g.dz);

  Eigen::FFT<double> fft;
  Eigen::MatrixXcd spec(nx, nz);
  Eigen::VectorXd col(nx);
  Eigen::VectorXcd scol(nx);
  for (int k = 0; k < nz; ++k) {
    col = rhs.col(k).matrix();
    fft.fwd(scol, col);
    spec.col(k) = scol;
  }

  // Per x-mode tridiagonal solve in z (Neumann ends); mode 0 pinned at k=0.
  Eigen::VectorXcd d(nz), rr(nz);
  Eigen::VectorXd diag(nz), sup(nz);
  for (int j = 0; j < nx; ++j) {
    for (int k = 0; k < nz; ++k) {
      double dd = lambda_[j] - 2.0 * idz2;
      if (k == 0 || k == nz - 1) dd = lambda_[j] - idz2;
      diag(k) = dd;
      sup(k) = idz2;
      rr(k) = spec(j, k);
    }
    if (j == 0) {
      diag(0) = 1.0;
      sup(0) = 0.0;
      rr(0) = 0.0;
    }
    // Thomas with real coefficients and complex rhs.
    double sub1 = idz2;
    std::vector<double> cp(nz);
    cp[0] = sup(0) / diag(0);
    rr(0) /= diag(0);
    for (int k = 1; k < nz; ++k) {
      double sub = (j == 0 && k == 1) ? idz2 : sub1;
      double m = diag(k) - sub * cp[k - 1];
      cp[k] = sup(k) / m;
      rr(k) = (rr(k) - sub * rr(k - 1)) / m;
    }
    for (int k = nz - 2; k >= 0; --k) rr(k) -= cp[k] * rr(k + 1);
    for (int k = 0; k < nz; ++k) spec(j, k) = rr(k);
  }

  phi.resize(nx, nz);
  Eigen::VectorXd out(nx);
  for (int k = 0; k < nz; ++k) {
    scol = spec.col(k);
    fft.inv(out, scol);
    phi.col(k) = out.array();
  }
  phi -= field_mean(phi);
}

VariablePoisson::VariablePoisson(const Grid& g) : cc_(g) {}

ScalarField VariablePoisson::solve(const ScalarField& rho, const ScalarField& rhs,
                                   const PoissonOptions& opt,
                                   PoissonSolveReport& report) const {
  return solve(rho, rhs, opt, report, nullptr);
}

ScalarField VariablePoisson::solve(const ScalarField& rho, const ScalarField& rhs,
                                   const PoissonOptions& opt,
                                   PoissonSolveReport& report,
                                   const Array2D* initial_guess) const {
  const Grid& g = *rho.g;
  const int nx = g.nx, nz = g.nz;
  report = PoissonSolveReport{};
  report.tolerance = opt.tol;

  VectorField rf = rho_on_faces(rho);
  Array2D inv_rx = rf.u1.inverse();
  Array2D inv_rz = rf.u2.inverse();

  const double idx = 1.0 / g.dx, idz = 1.0 / g.dz;
  Array2D fx(nx, nz), fz(nx, nz + 1);
  // B = -div(grad(.)/rho): SPD on the mean-zero subspace.
  auto applyB = [&](const Array2D& p, Array2D& out) {
    for (int k = 0; k < nz; ++k) {
      fx(0, k) = (p(0, k) - p(nx - 1, k)) * idx * inv_rx(0, k);
      for (int i = 1; i < nx; ++i) fx(i, k) = (p(i, k) - p(i - 1, k)) * idx * inv_rx(i, k);
    }
    fz.col(0).setZero();
    fz.col(nz).setZero();
    for (int k = 1; k < nz; ++k) fz.col(k) = (p.col(k) - p.col(k - 1)) * idz * inv_rz.col(k);
    out.resize(nx, nz);
    for (int k = 0; k < nz; ++k) {
      for (int i = 0; i < nx - 1; ++i) out(i, k) = -(fx(i + 1, k) - fx(i, k)) * idx;
      out(nx - 1, k) = -(fx(0, k) - fx(nx - 1, k)) * idx;
      out.col(k) -= (fz.col(k + 1) - fz.col(k)) * idz;
    }
  };

  Array2D b = -rhs.v;
  double rhs_mean = field_mean(b);
  if (std::abs(rhs_mean) > 1e-10 * (1.0 + b.abs().maxCoeff())) report.rhs_mean_warning = true;
  b -= rhs_mean;

  double bnorm = std::sqrt(dot2(b, b));
  ScalarField phi(g, Stagger::Center);
  if (bnorm == 0.0) {
    report.final_residual = 0.0;
    return phi;
  }

  double rho_mean = field_mean(rho.v);
  auto precond = [&](const Array2D& r, Array2D& z) {
    cc_.solve(r, z);
    z *= -rho_mean;
  };

  Array2D x = initial_guess ? *initial_guess : Array2D::Zero(nx, nz).eval();
  if (initial_guess) x = x - field_mean(x);
  Array2D r(nx, nz), z(nx, nz), p(nx, nz), Bp(nx, nz);
  applyB(x, Bp);
  r = b - Bp;
  precond(r, z);
  p = z;
  double rz = dot2(r, z);
  double res = std::sqrt(dot2(r, r)) / bnorm;
  int it = 0;
  while (res > opt.tol && it < opt.max_iter) {
    applyB(p, Bp);
    double pBp = dot2(p, Bp);
    if (!(pBp > 0.0)) break;  // indefinite direction: numerical breakdown
    double alpha = rz / pBp;
    x += alpha * p;
    r -= alpha * Bp;
    res = std::sqrt(dot2(r, r)) / bnorm;
    ++it;
    if (res <= opt.tol) break;
    precond(r, z);
    double rz_new = dot2(r, z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  report.iterations = it;
  report.final_residual = res;
  report.converged = (res <= opt.tol);
  if (!report.converged && it >= opt.max_iter)
    throw std::runtime_error("VariablePoisson: no convergence after max_iter");
  phi.v = x - field_mean(x);
  return phi;
}

ProjectionResult project(const VectorField& u_star, const ScalarField& rho,
                         double dt, const PoissonOptions& opt,
                         const Array2D* initial_guess) {
  const Grid& g = *u_star.g;
  ProjectionResult out;
  ScalarField rhs = div(u_star);
  rhs.v /= dt;
  VariablePoisson vp(g);
  out.phi = vp.solve(rho, rhs, opt, out.report, initial_guess);
  out.gradP = grad(out.phi);
  VectorField rf = rho_on_faces(rho);
  out.u = VectorField(g, u_star.bc);
  out.u.u1 = u_star.u1 - dt * out.gradP.u1 / rf.u1;
  out.u.u2 = u_star.u2;
  for (int k = 1; k < g.nz; ++k)
    out.u.u2.col(k) -= dt * out.gradP.u2.col(k) / rf.u2.col(k);
  out.u.zero_wall_normal();
  return out;
}

HelmholtzResult helmholtz_decompose(const VectorField& v) {
  const Grid& g = *v.g;
  // Interior-flux divergence: wall data of v moves to the right-hand side.
  VectorField vt = v;
  vt.zero_wall_normal();
  ScalarField rhs = div(vt);
  ConstCoeffPoisson cc(g);
  HelmholtzResult out;
  out.q = ScalarField(g, Stagger::Center);
  cc.solve(rhs.v, out.q.v);
  VectorField gq = grad(out.q);
  out.w = VectorField(g, v.bc);
  out.w.u1 = v.u1 - gq.u1;
  out.w.u2 = v.u2 - gq.u2;
  // grad q at the walls carries the Neumann data v.n, so w.n = 0 exactly.
  out.w.zero_wall_normal();
  return out;
}

}  // namespace iins
