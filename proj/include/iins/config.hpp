#pragma once

#include <string>

namespace iins {

/// Flat run configuration, mirrored one-to-one with the INI-style config file
/// (sections [grid], [physics], [profile], [time], [io], [poisson]).
struct Config {
  std::string scenario;  // optional label, written as a comment

  // [grid]
  int nx = 128;
  int nz = 64;
  double Lx = 1.0;
  double h = 1.0;

  // [physics]
  double nu = 1e-2;
  double g = 1.0;
  double f_offset = 1.0;  // potential f = f_offset + g z
  double gamma = 1.0;
  double beta = 2.0;
  std::string bc = "no-slip";       // no-slip | free-slip
  std::string limiter = "minmod";   // minmod | superbee

  // [profile] kind: linear rho_s = -gamma f + beta;
  // exponential rho_s = alpha1 + (alpha2-alpha1) exp(-delta0 (f - f_min));
  // unstable-step heavy-over-light tanh step, peak d(rho_s)/df = delta0.
  std::string profile_kind = "linear";
  double alpha1 = 1.0;
  double alpha2 = 2.0;
  double delta0 = 0.0;
  std::string seed = "none";  // none | solenoidal | linstab
  double amplitude = 0.0;
  int mode_x = 1;
  int mode_z = 1;

  // [time]
  double cfl = 0.45;
  double t_end = 1.0;
  double dt_max = 1e-2;
  std::string viscous = "explicit";  // explicit | cn

  // [io]
  int sample_every = 1;
  int snapshot_every = 0;
  std::string outdir = "out";

  // [poisson]
  double tol = 1e-12;
  int max_iter = 10000;
};

/// Strict parser: unknown sections/keys and malformed values are errors.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

/// Canonical form; parse -> serialize -> parse is a fixed point.
std::string serialize_config(const Config& c);
void save_config(const Config& c, const std::string& path);

}  // namespace iins
