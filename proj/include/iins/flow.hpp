#pragma once

#include <functional>
#include <string>

#include "iins/elliptic.hpp"
#include "iins/equilibrium.hpp"
#include "iins/grid.hpp"
#include "iins/transport.hpp"

namespace iins {

enum class ViscousScheme { Explicit, CrankNicolson };

struct Params {
  double nu = 1e-2;
  double gamma = 1.0;  // reference linear profile for diagnostics
  double beta = 2.0;
  double cfl = 0.45;
  double t_end = 1.0;
  double dt_max = 1e-2;
  WallBC bc = WallBC::NoSlip;
  ViscousScheme viscous = ViscousScheme::Explicit;
  DensityBounds bounds{1.0, 1.0};
  PoissonOptions poisson;
  Limiter limiter = Limiter::Minmod;
};

struct State {
  VectorField u;
  ScalarField rho;
  ScalarField P;
  double t = 0.0;
};

/// Stable dt: min(dt_max, cfl * advective limit, diffusive limit when the
/// viscous term is explicit).
double compute_dt(const State& state, const Params& params);

/// One step of the split scheme: half density transport, RK2 momentum with
/// buoyancy folded into the projection source, variable-density projection,
/// half density transport with the projected velocity.
State step(const State& state, const Params& params, const PotentialSpec& pot,
           double dt);

struct RunSummary {
  State final_state;
  long steps = 0;
  bool aborted = false;
  std::string abort_reason;
};

using SampleHook =
    std::function<void(const State& cur, const State& prev, long step_index, double dt)>;
using SnapshotHook = std::function<void(const State& cur, long step_index)>;

struct RunHooks {
  int sample_every = 1;
  int snapshot_every = 0;  // 0 = never
  SampleHook on_sample;
  SnapshotHook on_snapshot;
};

/// Advance to params.t_end. Hooks fire on step 0 (initial state) and on the
/// final step regardless of cadence.
RunSummary run(const State& initial, const Params& params, const PotentialSpec& pot,
               const RunHooks& hooks);

/// Kinetic-energy preserving MAC advection term (divergence form), returned
/// as the tendency -(u . grad)u on faces.
VectorField momentum_advection(const VectorField& u);

}  // namespace iins
