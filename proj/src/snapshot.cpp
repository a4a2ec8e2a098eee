#include "iins/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace iins {

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

void write_f64(std::ostream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

void write_array(std::ostream& os, const Array2D& a) {
  // column-major storage with x as rows == x fastest
  for (Eigen::Index k = 0; k < a.cols(); ++k)
    for (Eigen::Index i = 0; i < a.rows(); ++i) write_f64(os, a(i, k));
}

void read_array(std::istream& is, Array2D& a, int nx, int nzr) {
  a.resize(nx, nzr);
  for (int k = 0; k < nzr; ++k)
    for (int i = 0; i < nx; ++i) a(i, k) = read_f64(is);
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_snapshot: cannot open " + path);
  os.write("IINS", 4);
  write_u32(os, 1u);
  write_u32(os, static_cast<std::uint32_t>(s.grid.nx));
  write_u32(os, static_cast<std::uint32_t>(s.grid.nz));
  write_f64(os, s.grid.Lx);
  write_f64(os, s.grid.h);
  write_f64(os, s.t);
  write_array(os, s.rho);
  write_array(os, s.u1);
  write_array(os, s.u2);
  write_array(os, s.P);
  if (!os) throw std::runtime_error("write_snapshot: write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_snapshot: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "IINS", 4) != 0)
    throw std::runtime_error("read_snapshot: bad magic in " + path);
  std::uint32_t version = read_u32(is);
  if (version != 1u) throw std::runtime_error("read_snapshot: unsupported version");
  int nx = static_cast<int>(read_u32(is));
  int nz = static_cast<int>(read_u32(is));
  double Lx = read_f64(is);
  double h = read_f64(is);
  Snapshot s;
  s.grid = Grid(nx, nz, Lx, h);
  s.t = read_f64(is);
  read_array(is, s.rho, nx, nz);
  read_array(is, s.u1, nx, nz);
  read_array(is, s.u2, nx, nz + 1);
  read_array(is, s.P, nx, nz);
  if (!is) throw std::runtime_error("read_snapshot: truncated file " + path);
  return s;
}

}  // namespace iins
