#include "iins/flow.hpp"

#include <cmath>
#include <stdexcept>

namespace iins {

namespace {

bool all_finite(const Array2D& a) { return a.isFinite().all(); }

/// u1 sampled at z-nodes (corners), ghosted per wall BC; only interior
/// corners are ever multiplied by a nonzero u2, so wall rows may be anything
/// consistent.
}  // namespace

VectorField momentum_advection(const VectorField& u) {
  const Grid& g = *u.g;
  const int nx = g.nx, nz = g.nz;
  const double idx = 1.0 / g.dx, idz = 1.0 / g.dz;
  VectorField out(g, u.bc);

  // Cell-centered flux (avg_x u1)^2 and corner fluxes.
  Array2D Fc(nx, nz);
  for (int k = 0; k < nz; ++k)
    for (int i = 0; i < nx; ++i) {
      int ip = (i == nx - 1) ? 0 : i + 1;
      double a = 0.5 * (u.u1(i, k) + u.u1(ip, k));
      Fc(i, k) = a * a;
    }
  // Corner (i,k) at (i dx, k dz), k = 0..nz: u2 there is zero on walls.
  Array2D u1n(nx, nz + 1), u2n(nx, nz + 1);
  for (int k = 0; k <= nz; ++k)
    for (int i = 0; i < nx; ++i) {
      int im = (i == 0) ? nx - 1 : i - 1;
      u2n(i, k) = 0.5 * (u.u2(im, k) + u.u2(i, k));
      if (k == 0)
        u1n(i, k) = (u.bc == WallBC::NoSlip) ? 0.0 : u.u1(i, 0);
      else if (k == nz)
        u1n(i, k) = (u.bc == WallBC::NoSlip) ? 0.0 : u.u1(i, nz - 1);
      else
        u1n(i, k) = 0.5 * (u.u1(i, k - 1) + u.u1(i, k));
    }

  for (int k = 0; k < nz; ++k)
    for (int i = 0; i < nx; ++i) {
      int im = (i == 0) ? nx - 1 : i - 1;
      double ddx = (Fc(i, k) - Fc(im, k)) * idx;
      double ddz = (u2n(i, k + 1) * u1n(i, k + 1) - u2n(i, k) * u1n(i, k)) * idz;
      out.u1(i, k) = -(ddx + ddz);
    }

  // u2 transport: corner flux u1n*u2n in x, centered square flux in z.
  for (int k = 1; k < nz; ++k)
    for (int i = 0; i < nx; ++i) {
      int ip = (i == nx - 1) ? 0 : i + 1;
      double ddx = (u1n(ip, k) * u2n(ip, k) - u1n(i, k) * u2n(i, k)) * idx;
      double blo = 0.5 * (u.u2(i, k - 1) + u.u2(i, k));
      double bhi = 0.5 * (u.u2(i, k) + u.u2(i, k + 1));
      double ddz = (bhi * bhi - blo * blo) * idz;
      out.u2(i, k) = -(ddx + ddz);
    }
  return out;
}

double compute_dt(const State& state, const Params& params) {
  const Grid& g = *state.rho.g;
  double dt = params.dt_max;
  double u1m = state.u.u1.abs().maxCoeff();
  double u2m = state.u.u2.abs().maxCoeff();
  if (u1m > 0.0) dt = std::min(dt, params.cfl * g.dx / u1m);
  if (u2m > 0.0) dt = std::min(dt, params.cfl * g.dz / u2m);
  if (params.viscous == ViscousScheme::Explicit && params.nu > 0.0) {
    double hmin = std::min(g.dx, g.dz);
    dt = std::min(dt, 0.25 * hmin * hmin * params.bounds.alpha1 / params.nu);
  }
  return dt;
}

namespace {

/// Explicit momentum tendency: advection plus nu*lap(u)/rho_face.
VectorField explicit_rhs(const VectorField& u, const VectorField& rho_face, double nu,
                         bool include_viscous) {
  VectorField rhs = momentum_advection(u);
  if (include_viscous && nu > 0.0) {
    VectorField lap = laplacian_vec(u);
    rhs.u1 += nu * lap.u1 / rho_face.u1;
    const Grid& g = *u.g;
    for (int k = 1; k < g.nz; ++k)
      rhs.u2.col(k) += nu * lap.u2.col(k) / rho_face.u2.col(k);
  }
  return rhs;
}

/// CG solve of (rho - c*Lap) u = b componentwise-coupled (Lap couples only
/// within a component, so this is two independent SPD solves done together).
void solve_helmholtz_cn(VectorField& u, const VectorField& rho_face, double c,
                        const VectorField& b, double tol, int max_iter) {
  auto applyA = [&](const VectorField& x, VectorField& out) {
    VectorField lap = laplacian_vec(x);
    out.u1 = rho_face.u1 * x.u1 - c * lap.u1;
    out.u2 = rho_face.u2 * x.u2 - c * lap.u2;
    out.zero_wall_normal();
  };
  const Grid& g = *u.g;
  VectorField r(g, u.bc), p(g, u.bc), Ap(g, u.bc);
  applyA(u, Ap);
  r.u1 = b.u1 - Ap.u1;
  r.u2 = b.u2 - Ap.u2;
  r.zero_wall_normal();
  p = r;
  double bnorm = l2_norm(b);
  if (bnorm == 0.0) bnorm = 1.0;
  double rr = inner(r, r);
  for (int it = 0; it < max_iter && std::sqrt(rr) / bnorm > tol; ++it) {
    applyA(p, Ap);
    double alpha = rr / inner(p, Ap);
    u.u1 += alpha * p.u1;
    u.u2 += alpha * p.u2;
    r.u1 -= alpha * Ap.u1;
    r.u2 -= alpha * Ap.u2;
    double rr_new = inner(r, r);
    p.u1 = r.u1 + (rr_new / rr) * p.u1;
    p.u2 = r.u2 + (rr_new / rr) * p.u2;
    rr = rr_new;
  }
  u.zero_wall_normal();
}

}  // namespace

State step(const State& state, const Params& params, const PotentialSpec& pot,
           double dt) {
  if (dt < 1e-12) throw std::runtime_error("step: dt underflow (stiffness)");
  const Grid& g = *state.rho.g;
  TransportOptions topt;
  topt.limiter = params.limiter;

  // (i) density half step with u^n
  ScalarField rho_half = advect_density(state.rho, state.u, 0.5 * dt, topt);
  VectorField rho_face = rho_on_faces(rho_half);

  // (ii) momentum: RK2 (Heun) on advection (+ viscosity when explicit)
  bool expl = (params.viscous == ViscousScheme::Explicit);
  VectorField s1 = explicit_rhs(state.u, rho_face, params.nu, expl);
  VectorField u_mid(g, state.u.bc);
  u_mid.u1 = state.u.u1 + dt * s1.u1;
  u_mid.u2 = state.u.u2 + dt * s1.u2;
  u_mid.zero_wall_normal();
  VectorField s2 = explicit_rhs(u_mid, rho_face, params.nu, expl);
  VectorField u_star(g, state.u.bc);
  u_star.u1 = state.u.u1 + 0.5 * dt * (s1.u1 + s2.u1);
  u_star.u2 = state.u.u2 + 0.5 * dt * (s1.u2 + s2.u2);
  u_star.zero_wall_normal();

  if (!expl && params.nu > 0.0) {
    // Crank-Nicolson viscosity: (rho - dt nu/2 L) u* = rho u_adv + dt nu/2 L u^n
    VectorField lap_n = laplacian_vec(state.u);
    VectorField b(g, state.u.bc);
    double c = 0.5 * dt * params.nu;
    b.u1 = rho_face.u1 * u_star.u1 + c * lap_n.u1;
    b.u2 = rho_face.u2 * u_star.u2 + c * lap_n.u2;
    b.zero_wall_normal();
    solve_helmholtz_cn(u_star, rho_face, c, b, 1e-12, 2000);
  }

  // Buoyancy folded into the projection source: -(rho_face grad f)/rho_face.
  VectorField u_eff(g, state.u.bc);
  u_eff.u1 = u_star.u1 - dt * pot.gradf.u1;
  u_eff.u2 = u_star.u2 - dt * pot.gradf.u2;
  u_eff.zero_wall_normal();

  // (iii) variable-density projection; previous pressure as initial guess.
  ProjectionResult proj = project(u_eff, rho_half, dt, params.poisson, &state.P.v);

  // (iv) density half step with u^{n+1}
  ScalarField rho_new = advect_density(rho_half, proj.u, 0.5 * dt, topt);

  if (!all_finite(proj.u.u1) || !all_finite(proj.u.u2) || !all_finite(rho_new.v))
    throw std::runtime_error("step: NaN detected");

  State out;
  out.u = std::move(proj.u);
  out.rho = std::move(rho_new);
  out.P = std::move(proj.phi);
  out.t = state.t + dt;
  return out;
}

RunSummary run(const State& initial, const Params& params, const PotentialSpec& pot,
               const RunHooks& hooks) {
  RunSummary summary;
  State cur = initial;
  State prev = initial;
  long n = 0;
  if (hooks.on_sample) hooks.on_sample(cur, prev, 0, 0.0);
  if (hooks.on_snapshot && hooks.snapshot_every > 0) hooks.on_snapshot(cur, 0);
  const double t_eps = 1e-12;
  while (cur.t < params.t_end - t_eps) {
    double dt = compute_dt(cur, params);
    if (cur.t + dt > params.t_end) dt = params.t_end - cur.t;
    State next;
    try {
      next = step(cur, params, pot, dt);
    } catch (const std::exception& e) {
      summary.aborted = true;
      summary.abort_reason = e.what();
      break;
    }
    prev = std::move(cur);
    cur = std::move(next);
    ++n;
    bool final_step = (cur.t >= params.t_end - t_eps);
    if (hooks.on_sample &&
        (final_step || (hooks.sample_every > 0 && n % hooks.sample_every == 0)))
      hooks.on_sample(cur, prev, n, dt);
    if (hooks.on_snapshot && hooks.snapshot_every > 0 &&
        (final_step || n % hooks.snapshot_every == 0))
      hooks.on_snapshot(cur, n);
  }
  summary.final_state = std::move(cur);
  summary.steps = n;
  return summary;
}

}  // namespace iins
