#pragma once

#include <string>

#include "iins/grid.hpp"

namespace iins {

/// One simulation state as stored on disk.
struct Snapshot {
  Grid grid;
  double t = 0.0;
  Array2D rho;  // nx x nz
  Array2D u1;   // nx x nz
  Array2D u2;   // nx x (nz+1)
  Array2D P;    // nx x nz
};

/// Binary format: "IINS", version u32=1, nx u32, nz u32, Lx f64, h f64,
/// t f64, then rho, u1, u2, P as little-endian f64, x fastest.
void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);

}  // namespace iins
