#include "iins/operators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace iins {

double integrate(const ScalarField& s) {
  double cell = s.g->dx * s.g->dz;
  // Fixed-order reduction: per-column (x) sums, then sequential over z.
  double acc = 0.0;
  for (int k = 0; k < s.v.cols(); ++k) acc += s.v.col(k).sum();
  return acc * cell;
}

double lp_norm(const ScalarField& s, double p) {
  if (p < 1.0) throw std::domain_error("lp_norm: p must be >= 1");
  if (std::isinf(p)) return s.v.abs().maxCoeff();
  double cell = s.g->dx * s.g->dz;
  double acc = 0.0;
  for (int k = 0; k < s.v.cols(); ++k) acc += s.v.col(k).abs().pow(p).sum();
  return std::pow(acc * cell, 1.0 / p);
}

double inner(const ScalarField& a, const ScalarField& b) {
  if (a.site != b.site || !a.g->same_as(*b.g))
    throw std::invalid_argument("inner: incompatible fields");
  double acc = 0.0;
  for (int k = 0; k < a.v.cols(); ++k) acc += (a.v.col(k) * b.v.col(k)).sum();
  return acc * a.g->dx * a.g->dz;
}

double inner(const VectorField& a, const VectorField& b) {
  double acc = 0.0;
  for (int k = 0; k < a.u1.cols(); ++k) acc += (a.u1.col(k) * b.u1.col(k)).sum();
  for (int k = 0; k < a.u2.cols(); ++k) acc += (a.u2.col(k) * b.u2.col(k)).sum();
  return acc * a.g->dx * a.g->dz;
}

double l2_norm(const VectorField& v) { return std::sqrt(std::max(0.0, inner(v, v))); }

double max_abs(const VectorField& v) {
  return std::max(v.u1.abs().maxCoeff(), v.u2.abs().maxCoeff());
}

VectorField grad(const ScalarField& s) {
  if (s.site != Stagger::Center)
    throw std::invalid_argument("grad: expects a cell-centered field");
  const Grid& g = *s.g;
  VectorField out(g);
  const double idx = 1.0 / g.dx, idz = 1.0 / g.dz;
  for (int k = 0; k < g.nz; ++k) {
    out.u1(0, k) = (s.v(0, k) - s.v(g.nx - 1, k)) * idx;
    for (int i = 1; i < g.nx; ++i) out.u1(i, k) = (s.v(i, k) - s.v(i - 1, k)) * idx;
  }
  for (int k = 1; k < g.nz; ++k)
    out.u2.col(k) = (s.v.col(k) - s.v.col(k - 1)) * idz;
  return out;
}

ScalarField div(const VectorField& v) {
  const Grid& g = *v.g;
  ScalarField out(g, Stagger::Center);
  const double idx = 1.0 / g.dx, idz = 1.0 / g.dz;
  for (int k = 0; k < g.nz; ++k) {
    for (int i = 0; i < g.nx - 1; ++i)
      out.v(i, k) = (v.u1(i + 1, k) - v.u1(i, k)) * idx;
    out.v(g.nx - 1, k) = (v.u1(0, k) - v.u1(g.nx - 1, k)) * idx;
    out.v.col(k) += (v.u2.col(k + 1) - v.u2.col(k)) * idz;
  }
  return out;
}

ScalarField laplacian(const ScalarField& s) { return div(grad(s)); }

VectorField laplacian_vec(const VectorField& v) {
  const Grid& g = *v.g;
  VectorField out(g, v.bc);
  const double idx2 = 1.0 / (g.dx * g.dx), idz2 = 1.0 / (g.dz * g.dz);
  const double ghost = (v.bc == WallBC::NoSlip) ? -1.0 : 1.0;
  // u1 on x-faces; z-neighbors closed with the wall ghost.
  for (int k = 0; k < g.nz; ++k) {
    for (int i = 0; i < g.nx; ++i) {
      int im = (i == 0) ? g.nx - 1 : i - 1;
      int ip = (i == g.nx - 1) ? 0 : i + 1;
      double lo = (k == 0) ? ghost * v.u1(i, 0) : v.u1(i, k - 1);
      double hi = (k == g.nz - 1) ? ghost * v.u1(i, g.nz - 1) : v.u1(i, k + 1);
      out.u1(i, k) = (v.u1(ip, k) - 2.0 * v.u1(i, k) + v.u1(im, k)) * idx2 +
                     (hi - 2.0 * v.u1(i, k) + lo) * idz2;
    }
  }
  // u2 on interior z-faces; wall values are Dirichlet data.
  for (int k = 1; k < g.nz; ++k) {
    for (int i = 0; i < g.nx; ++i) {
      int im = (i == 0) ? g.nx - 1 : i - 1;
      int ip = (i == g.nx - 1) ? 0 : i + 1;
      out.u2(i, k) = (v.u2(ip, k) - 2.0 * v.u2(i, k) + v.u2(im, k)) * idx2 +
                     (v.u2(i, k + 1) - 2.0 * v.u2(i, k) + v.u2(i, k - 1)) * idz2;
    }
  }
  return out;
}

double grad_norm_sq(const VectorField& v) {
  const Grid& g = *v.g;
  const double idx2 = 1.0 / (g.dx * g.dx), idz2 = 1.0 / (g.dz * g.dz);
  double acc = 0.0;
  // u1: periodic x-differences.
  for (int k = 0; k < g.nz; ++k) {
    for (int i = 0; i < g.nx; ++i) {
      int ip = (i == g.nx - 1) ? 0 : i + 1;
      double d = v.u1(ip, k) - v.u1(i, k);
      acc += d * d * idx2;
    }
  }
  // u1: interior z-differences.
  for (int k = 1; k < g.nz; ++k)
    acc += ((v.u1.col(k) - v.u1.col(k - 1)).square()).sum() * idz2;
  // u1 wall closure: no-slip ghost -u contributes 2 u^2 / dz^2 per wall.
  if (v.bc == WallBC::NoSlip) {
    acc += 2.0 * v.u1.col(0).square().sum() * idz2;
    acc += 2.0 * v.u1.col(g.nz - 1).square().sum() * idz2;
  }
  // u2: z-differences including wall faces (Dirichlet data).
  for (int k = 1; k <= g.nz; ++k)
    acc += ((v.u2.col(k) - v.u2.col(k - 1)).square()).sum() * idz2;
  // u2: periodic x-differences on interior faces.
  for (int k = 1; k < g.nz; ++k) {
    for (int i = 0; i < g.nx; ++i) {
      int ip = (i == g.nx - 1) ? 0 : i + 1;
      double d = v.u2(ip, k) - v.u2(i, k);
      acc += d * d * idx2;
    }
  }
  return acc * g.dx * g.dz;
}

ScalarField make_center(const Grid& g) { return ScalarField(g, Stagger::Center); }

void to_centers(const VectorField& v, Array2D& u1c, Array2D& u2c) {
  const Grid& g = *v.g;
  u1c.resize(g.nx, g.nz);
  u2c.resize(g.nx, g.nz);
  for (int k = 0; k < g.nz; ++k) {
    for (int i = 0; i < g.nx; ++i) {
      int ip = (i == g.nx - 1) ? 0 : i + 1;
      u1c(i, k) = 0.5 * (v.u1(i, k) + v.u1(ip, k));
    }
    u2c.col(k) = 0.5 * (v.u2.col(k) + v.u2.col(k + 1));
  }
}

}  // namespace iins
