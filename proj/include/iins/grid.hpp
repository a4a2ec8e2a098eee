#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace iins {

using Array2D = Eigen::ArrayXXd;

/// Staggering site of a scalar quantity on the MAC grid.
enum class Stagger { Center, XFace, ZFace };

/// Wall condition applied at z = 0 and z = h.
enum class WallBC { NoSlip, FreeSlip };

/// Periodic-in-x, wall-bounded-in-z channel grid.
///
/// Cells are indexed (i, k) with i in [0, nx) along x and k in [0, nz)
/// along z. Cell centers sit at ((i+1/2) dx, (k+1/2) dz). x-faces sit at
/// (i dx, (k+1/2) dz); z-faces at ((i+1/2) dx, k dz) with k in [0, nz].
struct Grid {
  int nx = 0;
  int nz = 0;
  double Lx = 0.0;
  double h = 0.0;
  double dx = 0.0;
  double dz = 0.0;

  Grid() = default;
  Grid(int nx_, int nz_, double Lx_, double h_)
      : nx(nx_), nz(nz_), Lx(Lx_), h(h_) {
    if (nx < 4 || nz < 4) throw std::invalid_argument("Grid: nx, nz must be >= 4");
    if (Lx <= 0.0 || h <= 0.0) throw std::invalid_argument("Grid: Lx, h must be positive");
    dx = Lx / nx;
    dz = h / nz;
  }

  double xc(int i) const { return (i + 0.5) * dx; }
  double zc(int k) const { return (k + 0.5) * dz; }
  double xf(int i) const { return i * dx; }
  double zf(int k) const { return k * dz; }

  int wrap(int i) const { return (i % nx + nx) % nx; }

  bool same_as(const Grid& o) const {
    return nx == o.nx && nz == o.nz && Lx == o.Lx && h == o.h;
  }
};

/// Scalar samples at a fixed staggering site.
struct ScalarField {
  const Grid* g = nullptr;
  Stagger site = Stagger::Center;
  Array2D v;

  ScalarField() = default;
  ScalarField(const Grid& grid, Stagger s) : g(&grid), site(s) {
    v = Array2D::Zero(grid.nx, rows_z(grid, s));
  }

  static int rows_z(const Grid& grid, Stagger s) {
    switch (s) {
      case Stagger::Center: return grid.nz;
      case Stagger::XFace: return grid.nz;
      case Stagger::ZFace: return grid.nz + 1;
    }
    return grid.nz;
  }

  double& operator()(int i, int k) { return v(i, k); }
  double operator()(int i, int k) const { return v(i, k); }
};

/// MAC velocity: u1 on x-faces (nx x nz), u2 on z-faces (nx x (nz+1)).
/// z-face rows 0 and nz are the wall values of u2.
struct VectorField {
  const Grid* g = nullptr;
  WallBC bc = WallBC::NoSlip;
  Array2D u1;
  Array2D u2;

  VectorField() = default;
  VectorField(const Grid& grid, WallBC bc_ = WallBC::NoSlip) : g(&grid), bc(bc_) {
    u1 = Array2D::Zero(grid.nx, grid.nz);
    u2 = Array2D::Zero(grid.nx, grid.nz + 1);
  }

  void zero_wall_normal() {
    u2.col(0).setZero();
    u2.col(g->nz).setZero();
  }
};

/// Admissible density range, 0 < alpha1 <= alpha2.
struct DensityBounds {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  DensityBounds() = default;
  DensityBounds(double a1, double a2) : alpha1(a1), alpha2(a2) {
    if (!(a1 > 0.0) || !(a2 >= a1))
      throw std::invalid_argument("DensityBounds: need 0 < alpha1 <= alpha2");
  }
};

}  // namespace iins
