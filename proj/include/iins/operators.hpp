#pragma once

#include "iins/grid.hpp"

namespace iins {

/// Midpoint quadrature of a cell-centered (or face-sited) field.
double integrate(const ScalarField& s);

/// Discrete L^p norm; p = infinity accepted via p = std::numeric_limits<double>::infinity().
double lp_norm(const ScalarField& s, double p);

/// Inner product sum(a*b)*dx*dz over matching sites.
double inner(const ScalarField& a, const ScalarField& b);

/// Face inner product sum(u1*v1 + u2*v2)*dx*dz; wall z-faces included.
double inner(const VectorField& a, const VectorField& b);

double l2_norm(const VectorField& v);
double max_abs(const VectorField& v);

/// Gradient of a cell-centered field: x-component on x-faces (periodic wrap),
/// z-component on interior z-faces, zero on walls.
VectorField grad(const ScalarField& s);

/// Divergence of a face field onto cell centers. Wall z-face values of u2
/// participate (normally zero).
ScalarField div(const VectorField& v);

/// div(grad(s)): 5-point Laplacian, periodic in x, homogeneous Neumann in z.
ScalarField laplacian(const ScalarField& s);

/// Componentwise Laplacian of a MAC velocity with wall closure from v.bc.
/// The returned field has zero wall-normal rows.
VectorField laplacian_vec(const VectorField& v);

/// ||grad u||^2_{L2} by face differences consistent with laplacian_vec, so
/// that grad_norm_sq(v) == -<v, laplacian_vec(v)> to roundoff.
double grad_norm_sq(const VectorField& v);

ScalarField make_center(const Grid& g);

/// Interpolate u1 and u2 to cell centers (arithmetic face average).
void to_centers(const VectorField& v, Array2D& u1c, Array2D& u2c);

}  // namespace iins
