#include "iins/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace iins {

namespace {

double quad_sum(const Grid& g, const Array2D& a) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a.col(k).sum();
  return acc * g.dx * g.dz;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<VectorField> build_test_bank(const Grid& g, int kmax) {
  std::vector<VectorField> bank;
  auto envelope = [&](double z) {
    double s = z * (g.h - z) / (g.h * g.h);
    return s * s;  // vanishes to second order at the walls
  };
  for (int j = 1; j <= kmax; ++j) {
    double kx = 2.0 * M_PI * j / g.Lx;
    VectorField phi_v(g);
    for (int k = 1; k < g.nz; ++k)
      for (int i = 0; i < g.nx; ++i)
        phi_v.u2(i, k) = envelope(g.zf(k)) * std::cos(kx * g.xc(i));
    bank.push_back(std::move(phi_v));
    VectorField phi_h(g);
    for (int k = 0; k < g.nz; ++k)
      for (int i = 0; i < g.nx; ++i)
        phi_h.u1(i, k) = envelope(g.zc(k)) * std::sin(kx * g.xf(i));
    bank.push_back(std::move(phi_h));
  }
  return bank;
}

std::vector<double> weak_convergence_surrogate(const State& state,
                                               const EquilibriumProfile& profile,
                                               const PotentialSpec& pot,
                                               const std::vector<VectorField>& bank) {
  std::vector<double> out;
  out.reserve(2 * bank.size());
  ScalarField varrho(*state.rho.g, Stagger::Center);
  varrho.v = state.rho.v - profile.rho_s.v;
  VectorField vf = rho_on_faces(varrho);
  VectorField gP = grad(state.P);
  VectorField resid(*state.u.g, state.u.bc);
  resid.u1 = gP.u1 + vf.u1 * pot.gradf.u1;
  resid.u2 = gP.u2 + vf.u2 * pot.gradf.u2;
  resid.zero_wall_normal();
  for (const auto& phi : bank) {
    VectorField lap_phi = laplacian_vec(phi);
    out.push_back(inner(state.u, lap_phi));
  }
  for (const auto& phi : bank) out.push_back(inner(resid, phi));
  return out;
}

DiagnosticsRecord sample(const State& state, const State& prev,
                         const EquilibriumProfile& profile, const PotentialSpec& pot,
                         const Params& params, DiagnosticsAccumulator& accum,
                         const std::vector<VectorField>& test_bank) {
  const Grid& g = *state.rho.g;
  DiagnosticsRecord r;
  r.t = state.t;

  Array2D u1c, u2c;
  to_centers(state.u, u1c, u2c);
  Array2D speed2 = u1c.square() + u2c.square();
  r.ke = 0.5 * quad_sum(g, (state.rho.v * speed2).eval());

  Array2D varrho = state.rho.v - profile.rho_s.v;
  r.pe = quad_sum(g, (varrho * pot.f.v).eval());
  r.E = r.ke + r.pe;

  double gsq = grad_norm_sq(state.u);
  r.grad_u_l2 = std::sqrt(gsq);
  if (accum.has_prev && state.t > accum.prev_t) {
    accum.diss_accum +=
        params.nu * 0.5 * (accum.prev_grad_sq + gsq) * (state.t - accum.prev_t);
  }
  accum.prev_t = state.t;
  accum.prev_grad_sq = gsq;
  accum.has_prev = true;
  r.diss_accum = accum.diss_accum;

  double dt = state.t - prev.t;
  if (dt > 0.0) {
    VectorField du(g, state.u.bc);
    du.u1 = state.u.u1 - prev.u.u1;
    du.u2 = state.u.u2 - prev.u.u2;
    r.ut_l2 = l2_norm(du) / dt;
  }

  Array2D theta = state.rho.v + params.gamma * pot.f.v - params.beta;
  r.theta_l2sq = quad_sum(g, theta.square().eval());
  r.E_gamma = params.gamma * r.ke + 0.5 * r.theta_l2sq;
  double rho_f = quad_sum(g, (state.rho.v * pot.f.v).eval());
  r.D_gamma = 0.5 * r.theta_l2sq - params.gamma * rho_f;
  r.rho_l2sq = quad_sum(g, state.rho.v.square().eval());
  r.mass = quad_sum(g, state.rho.v);

  ScalarField vr(g, Stagger::Center);
  vr.v = varrho;
  VectorField vrf = rho_on_faces(vr);
  VectorField buoy(g, state.u.bc);
  buoy.u1 = vrf.u1 * pot.gradf.u1;
  buoy.u2 = vrf.u2 * pot.gradf.u2;
  buoy.zero_wall_normal();
  HelmholtzResult hh = helmholtz_decompose(buoy);
  r.w_norm = l2_norm(hh.w);

  double usq = inner(state.u, state.u);
  double h1 = std::sqrt(usq + gsq);
  double l2w = std::sqrt(2.0 * std::max(0.0, r.ke));
  double l4sq = std::sqrt(quad_sum(g, (state.rho.v.square() * speed2.square()).eval()));
  if (h1 > 0.0)
    r.ln_ratio = l4sq / ((1.0 + l2w) * h1 * std::sqrt(std::log(2.0 + h1 * h1)));

  if (!test_bank.empty())
    r.weak_tests = weak_convergence_surrogate(state, profile, pot, test_bank);
  return r;
}

double energy_identity_residual(const DiagnosticsSeries& series) {
  if (series.rows.empty()) throw std::invalid_argument("empty series");
  const auto& r0 = series.rows.front();
  double scale = std::max(1.0, r0.ke + std::abs(r0.pe));
  double worst = 0.0;
  for (const auto& r : series.rows)
    worst = std::max(worst, std::abs((r.ke + r.pe + r.diss_accum) - (r0.ke + r0.pe)) / scale);
  return worst;
}

double gamma_identity_residual(const DiagnosticsSeries& series, double gamma) {
  if (series.rows.empty()) throw std::invalid_argument("empty series");
  const auto& r0 = series.rows.front();
  double scale = std::max(1.0, std::abs(r0.E_gamma));
  double worst = 0.0;
  for (const auto& r : series.rows)
    worst = std::max(worst,
                     std::abs((r.E_gamma + gamma * r.diss_accum) - r0.E_gamma) / scale);
  return worst;
}

double dgamma_bookkeeping_check(const DiagnosticsSeries& series, double /*gamma*/,
                                double beta) {
  if (series.rows.empty()) throw std::invalid_argument("empty series");
  const auto& r0 = series.rows.front();
  double scale = std::max(1.0, std::abs(r0.D_gamma));
  double worst = 0.0;
  for (const auto& r : series.rows) {
    double lhs = r.D_gamma - r0.D_gamma;
    double rhs = 0.5 * (r.rho_l2sq - r0.rho_l2sq) - beta * (r.mass - r0.mass);
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

ProfileGapCondition profile_gap_condition(const DiagnosticsSeries& series, double gamma,
                                       double /*beta*/) {
  if (series.rows.empty()) throw std::invalid_argument("empty series");
  const auto& r0 = series.rows.front();
  const auto& re = series.rows.back();
  ProfileGapCondition c;
  c.lhs = 2.0 * gamma * (r0.pe - re.pe);
  c.rhs = r0.theta_l2sq;
  c.gap = c.lhs - c.rhs;
  c.theta_end = re.theta_l2sq;
  double ut_max = 0.0;
  for (const auto& r : series.rows) ut_max = std::max(ut_max, r.ut_l2);
  c.settled = (re.ut_l2 <= 1e-3 * ut_max) || ut_max == 0.0;
  return c;
}

void write_csv(const std::string& path, const DiagnosticsSeries& series) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  os << "t,ke,pe,E,diss_accum,grad_u_l2,ut_l2,theta_l2sq,E_gamma,D_gamma,rho_l2sq,"
        "mass,w_norm,ln_ratio";
  std::size_t nw = series.rows.empty() ? 0 : series.rows.front().weak_tests.size();
  for (std::size_t j = 0; j < nw; ++j) os << ",weak_" << j;
  os << "\n";
  for (const auto& r : series.rows) {
    os << fmt17(r.t) << ',' << fmt17(r.ke) << ',' << fmt17(r.pe) << ',' << fmt17(r.E)
       << ',' << fmt17(r.diss_accum) << ',' << fmt17(r.grad_u_l2) << ','
       << fmt17(r.ut_l2) << ',' << fmt17(r.theta_l2sq) << ',' << fmt17(r.E_gamma)
       << ',' << fmt17(r.D_gamma) << ',' << fmt17(r.rho_l2sq) << ',' << fmt17(r.mass)
       << ',' << fmt17(r.w_norm) << ',' << fmt17(r.ln_ratio);
    for (double w : r.weak_tests) os << ',' << fmt17(w);
    os << "\n";
  }
}

DiagnosticsSeries read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_csv: cannot open " + path);
  DiagnosticsSeries series;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_csv: empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) header.push_back(tok);
  }
  const std::vector<std::string> required = {
      "t", "ke", "pe", "E", "diss_accum", "grad_u_l2", "ut_l2", "theta_l2sq",
      "E_gamma", "D_gamma", "rho_l2sq", "mass", "w_norm", "ln_ratio"};
  if (header.size() < required.size())
    throw std::runtime_error("read_csv: missing columns in " + path);
  for (std::size_t j = 0; j < required.size(); ++j)
    if (header[j] != required[j])
      throw std::runtime_error("read_csv: unexpected column '" + header[j] + "'");
  for (std::size_t j = required.size(); j < header.size(); ++j)
    series.weak_names.push_back(header[j]);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.size() != header.size())
      throw std::runtime_error("read_csv: ragged row in " + path);
    DiagnosticsRecord r;
    int j = 0;
    r.t = vals[j++]; r.ke = vals[j++]; r.pe = vals[j++]; r.E = vals[j++];
    r.diss_accum = vals[j++]; r.grad_u_l2 = vals[j++]; r.ut_l2 = vals[j++];
    r.theta_l2sq = vals[j++]; r.E_gamma = vals[j++]; r.D_gamma = vals[j++];
    r.rho_l2sq = vals[j++]; r.mass = vals[j++]; r.w_norm = vals[j++];
    r.ln_ratio = vals[j++];
    for (; j < static_cast<int>(vals.size()); ++j) r.weak_tests.push_back(vals[j]);
    series.rows.push_back(std::move(r));
  }
  return series;
}

}  // namespace iins
