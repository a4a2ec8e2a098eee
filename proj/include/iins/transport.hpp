#pragma once

#include "iins/grid.hpp"
#include "iins/operators.hpp"

namespace iins {

enum class Limiter { Minmod, Superbee };

struct TransportOptions {
  Limiter limiter = Limiter::Minmod;
  /// When true, every updated cell value is checked against the local
  /// neighborhood min/max; a violation aborts (internal invariant failure).
  bool check_bounds = false;
};

/// Conservative, bound-preserving advection of rho by the face velocity u.
/// Flux-form MUSCL fluxes with a flux-corrected clip toward first-order
/// upwind, so cell values stay inside the local min/max of the old state.
/// Requires dt*(|u1|/dx + |u2|/dz) <= 1; throws a CFL error otherwise.
ScalarField advect_density(const ScalarField& rho, const VectorField& u, double dt,
                           const TransportOptions& opt = {});

/// Monitoring hook: integral of rho^2 (nonincreasing across advection steps).
double density_l2(const ScalarField& rho);

}  // namespace iins
