#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iins/bihari.hpp"
#include "iins/config.hpp"
#include "iins/diagnostics.hpp"
#include "iins/equilibrium.hpp"
#include "iins/linstab.hpp"
#include "iins/scenarios.hpp"
#include "iins/snapshot.hpp"

namespace {

using namespace iins;

// exit contract: 0 pass, 1 check failure, 2 incomplete inputs, 3 solver abort
constexpr int kPass = 0, kFail = 1, kIncomplete = 2, kAbort = 3;

struct CommonOpts {
  std::string config_path;
  std::string scenario_name;
};

void add_common(CLI::App* app, CommonOpts& o) {
  auto* cfg = app->add_option("--config", o.config_path, "INI config file");
  app->add_option("--scenario", o.scenario_name,
                  "built-in scenario: rest, stable-relax, rt-unstable, "
                  "linear-converge")
      ->excludes(cfg);
}

Config make_config(const CommonOpts& o) {
  Config c;
  if (!o.config_path.empty())
    c = load_config(o.config_path);
  else if (!o.scenario_name.empty())
    c = scenario(o.scenario_name);
  else
    throw std::runtime_error("need --config <path> or --scenario <name>");
  apply_env_overrides(c);
  return c;
}

State state_from_snapshot(const Setup& setup, const std::string& path) {
  Snapshot snap = read_snapshot(path);
  if (!snap.grid.same_as(setup.grid))
    throw std::runtime_error("snapshot grid does not match config");
  State st;
  st.u = VectorField(setup.grid, setup.params.bc);
  st.u.u1 = snap.u1;
  st.u.u2 = snap.u2;
  st.rho = ScalarField(setup.grid, Stagger::Center);
  st.rho.v = snap.rho;
  st.P = ScalarField(setup.grid, Stagger::Center);
  st.P.v = snap.P;
  st.t = snap.t;
  return st;
}

int cmd_run(const CommonOpts& o, const std::string& restart_path) {
  Config c = make_config(o);
  auto setup = build_setup(c);
  State restart;
  const State* rp = nullptr;
  if (!restart_path.empty()) {
    restart = state_from_snapshot(*setup, restart_path);
    rp = &restart;
  }
  RunResult res = run_to_files(*setup, rp);
  std::cout << "steps: " << res.summary.steps << "\n"
            << "final t: " << res.summary.final_state.t << "\n"
            << "outputs: " << setup->config.outdir << "\n";
  if (res.summary.aborted) {
    std::cout << "aborted: " << res.summary.abort_reason << "\n";
    return kAbort;
  }
  return kPass;
}

int cmd_linstab(const CommonOpts& o, double kmin, double kmax, int nk,
                int nz_modes, std::string out) {
  Config c = make_config(o);
  auto setup = build_setup(c);
  StabilityProblem p;
  p.nz_modes = nz_modes > 0 ? nz_modes : c.nz;
  p.nu = c.nu;
  p.g = c.g;
  p.h = c.h;
  p.rho_s.resize(p.nz_modes + 1);
  p.delta.resize(p.nz_modes + 1);
  // sample the hydrostatic profile columns onto the mode grid,
  // piecewise-linear in z from the (x-constant) cell-center columns
  const Grid& g = setup->grid;
  for (int j = 0; j <= p.nz_modes; ++j) {
    double z = c.h * j / p.nz_modes;
    double s = z / g.dz - 0.5;
    int k0 = std::max(0, std::min(g.nz - 2, static_cast<int>(std::floor(s))));
    double w = std::max(0.0, std::min(1.0, s - k0));
    p.rho_s(j) = (1.0 - w) * setup->profile.rho_s.v(0, k0) +
                 w * setup->profile.rho_s.v(0, k0 + 1);
    p.delta(j) = (1.0 - w) * setup->profile.slope.v(0, k0) +
                 w * setup->profile.slope.v(0, k0 + 1);
  }
  if (kmin <= 0.0) kmin = 2.0 * M_PI / c.Lx;
  if (kmax <= 0.0) kmax = 2.0 * M_PI * (c.nx / 4) / c.Lx;
  if (nk < 1 || kmax < kmin)
    throw std::runtime_error("need 0 < kmin <= kmax and nk >= 1");
  std::vector<double> ks;
  for (int j = 0; j < nk; ++j)
    ks.push_back(nk == 1 ? kmin : kmin + (kmax - kmin) * j / (nk - 1));
  auto results = dispersion_scan(p, ks);
  if (out.empty()) out = c.outdir + "/dispersion.csv";
  auto parent = std::filesystem::path(out).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream os(out);
  os << "k,ReLambda,ImLambda,residual\n";
  char buf[160];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", r.k,
                  r.Lambda.real(), r.Lambda.imag(), r.variational_residual);
    os << buf;
  }
  double best = -1e300;
  for (const auto& r : results) best = std::max(best, r.Lambda.real());
  std::cout << "modes: " << results.size() << "\n"
            << "max Re(Lambda): " << best << "\n"
            << "output: " << out << "\n";
  return kPass;
}

int cmd_decompose(const CommonOpts& o, const std::string& snap_path) {
  Config c = make_config(o);
  auto setup = build_setup(c);
  Snapshot snap = read_snapshot(snap_path);
  if (!snap.grid.same_as(setup->grid))
    throw std::runtime_error("snapshot grid does not match config");
  ScalarField varrho(setup->grid, Stagger::Center);
  varrho.v = snap.rho - setup->profile.rho_s.v;
  VectorField vf = rho_on_faces(varrho);
  VectorField buoy(setup->grid);
  buoy.u1 = vf.u1 * setup->pot.gradf.u1;
  buoy.u2 = vf.u2 * setup->pot.gradf.u2;
  buoy.zero_wall_normal();
  HelmholtzResult hh = helmholtz_decompose(buoy);
  VectorField gq = grad(hh.q);
  VectorField recon(setup->grid);
  recon.u1 = buoy.u1 - hh.w.u1 - gq.u1;
  recon.u2 = buoy.u2 - hh.w.u2 - gq.u2;
  std::cout << "|varrho grad f|: " << l2_norm(buoy) << "\n"
            << "|w| (divergence-free part): " << l2_norm(hh.w) << "\n"
            << "|grad q|: " << l2_norm(gq) << "\n"
            << "reconstruction error: " << l2_norm(recon) << "\n";
  return kPass;
}

int cmd_verify_hydrostatic(const CommonOpts& o, const std::string& snap_path,
                           double tol) {
  Config c = make_config(o);
  auto setup = build_setup(c);
  HydrostaticCheck hc;
  if (!snap_path.empty()) {
    State st = state_from_snapshot(*setup, snap_path);
    hc = verify_hydrostatic(st.u, st.rho, st.P, setup->pot, c.nu, tol);
  } else {
    hc = verify_hydrostatic(setup->initial.u, setup->initial.rho, setup->initial.P,
                            setup->pot, c.nu, tol);
  }
  std::cout << "velocity norm: " << hc.velocity_norm << "\n"
            << "balance residual: " << hc.balance_residual << "\n"
            << "hydrostatic equilibrium: " << (hc.is_equilibrium ? "yes" : "no")
            << "\n";
  return hc.is_equilibrium ? kPass : kFail;
}

int cmd_bihari_check(const std::string& series_path, const std::string& col,
                     const std::string& wname, double a, double u0, double C,
                     double tol) {
  DiagnosticsSeries series = read_csv(series_path);
  if (series.rows.size() < 10)
    throw std::runtime_error("series too short for a verdict");
  auto pick = [&](const DiagnosticsRecord& r) -> double {
    if (col == "grad_u_l2") return r.grad_u_l2;
    if (col == "grad_u_l2_sq") return r.grad_u_l2 * r.grad_u_l2;
    if (col == "ut_l2") return r.ut_l2;
    if (col == "w_norm") return r.w_norm;
    if (col == "ke") return r.ke;
    if (col == "theta_l2sq") return r.theta_l2sq;
    throw std::runtime_error("unknown column " + col);
  };
  std::vector<double> t, y, h;
  for (const auto& r : series.rows) {
    t.push_back(r.t);
    y.push_back(pick(r));
    h.push_back(0.0);
  }

  BihariSpec spec;
  spec.u0 = u0;
  spec.a = a > 0.0 ? a : std::max(spec.u0, y.front() + spec.u0);
  if (wname == "linear")
    spec.w = [](double s) { return s; };
  else if (wname == "loglinear")
    spec.w = [](double s) { return s * std::log(2.0 + s); };
  else if (wname == "loglog")
    spec.w = [](double s) { return (2.0 + s) * std::log(2.0 + s); };
  else if (wname == "sqrt")
    spec.w = [](double s) { return std::sqrt(s) + 1.0; };
  else
    throw std::runtime_error(
        "unknown w builtin '" + wname + "'; valid: linear, loglinear, loglog, sqrt");
  spec.t = t;
  spec.g = y;  // treat the series itself as the inhomogeneity for the bound

  std::vector<double> bound = bihari_bound(spec);
  std::string note;
  bool suspect = divergence_suspect(spec, &note);
  DecayVerdict v = decay_detect(t, y, h, C, tol);

  std::ostringstream os;
  os << "bihari-check column=" << col << " w=" << wname << "\n";
  os << "bihari bound final: " << bound.back() << "\n";
  if (suspect) os << "warning: " << note << "\n";
  os << "integral: " << v.integral << ", tail max: " << v.tail_max << "\n";
  os << "hypotheses ok: " << (v.hypotheses_ok ? "yes" : "no")
     << ", decayed: " << (v.decayed ? "yes" : "no") << "\n";
  std::cout << os.str();

  std::filesystem::path dir = std::filesystem::path(series_path).parent_path();
  std::ofstream vf((dir.empty() ? "." : dir.string()) + "/bihari_verdict.txt");
  vf << os.str();
  return v.decayed ? kPass : kFail;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out_path) {
  std::ostringstream os;
  int code = write_report(dirs, os);
  std::cout << os.str();
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    f << os.str();
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"channel-flow simulator and verification suite"};
  app.require_subcommand(1);

  CommonOpts run_o, lin_o, dec_o, ver_o;
  std::string restart_path, snap_path, out_path;
  double kmin = 0.0, kmax = 0.0, tol = 1e-8;
  int nk = 16, nz_modes = 0;
  std::string series_path, column, wname = "loglog";
  double ba = 0.0, bu0 = 1.0, bC = 1.0, btol = 1e-4;
  std::vector<std::string> report_dirs;

  auto* run_c = app.add_subcommand("run", "advance a configuration to t_end");
  add_common(run_c, run_o);
  run_c->add_option("--restart", restart_path, "restart snapshot");

  auto* lin_c = app.add_subcommand("linstab", "normal-mode dispersion scan");
  add_common(lin_c, lin_o);
  lin_c->add_option("--kmin", kmin);
  lin_c->add_option("--kmax", kmax);
  lin_c->add_option("--nk", nk);
  lin_c->add_option("--nz-modes", nz_modes);
  lin_c->add_option("--out", out_path);

  auto* dec_c =
      app.add_subcommand("decompose", "Helmholtz split of a snapshot's buoyancy");
  add_common(dec_c, dec_o);
  dec_c->add_option("--snapshot", snap_path)->required();

  auto* ver_c = app.add_subcommand("verify-hydrostatic",
                                   "check a state against hydrostatic balance");
  add_common(ver_c, ver_o);
  ver_c->add_option("--snapshot", snap_path);
  ver_c->add_option("--tol", tol);

  auto* bih_c =
      app.add_subcommand("bihari-check", "integral-inequality verdict on a series");
  bih_c->add_option("--series", series_path)->required();
  bih_c->add_option("--column", column)->required();
  bih_c->add_option("--w", wname)->required();
  bih_c->add_option("--a", ba);
  bih_c->add_option("--u0", bu0);
  bih_c->add_option("--C", bC);
  bih_c->add_option("--tol", btol);

  auto* rep_c = app.add_subcommand("report", "aggregate verdicts for run outputs");
  rep_c->add_option("dirs", report_dirs, "run output directories")->required();
  rep_c->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_c->parsed()) return cmd_run(run_o, restart_path);
    if (lin_c->parsed())
      return cmd_linstab(lin_o, kmin, kmax, nk, nz_modes, out_path);
    if (dec_c->parsed()) return cmd_decompose(dec_o, snap_path);
    if (ver_c->parsed()) return cmd_verify_hydrostatic(ver_o, snap_path, tol);
    if (bih_c->parsed())
      return cmd_bihari_check(series_path, column, wname, ba, bu0, bC, btol);
    if (rep_c->parsed()) return cmd_report(report_dirs, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIncomplete;
  }
  return kIncomplete;
}
