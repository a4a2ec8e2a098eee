#pragma once

#include <string>
#include <vector>

#include "iins/elliptic.hpp"
#include "iins/equilibrium.hpp"
#include "iins/flow.hpp"

namespace iins {

/// One time sample of every monitored functional.
struct DiagnosticsRecord {
  double t = 0.0;
  double ke = 0.0;          // 1/2 ||sqrt(rho) u||^2
  double pe = 0.0;          // int (rho - rho_s) f
  double E = 0.0;           // ke + pe
  double diss_accum = 0.0;  // nu int_0^t ||grad u||^2 (trapezoid)
  double grad_u_l2 = 0.0;
  double ut_l2 = 0.0;
  double theta_l2sq = 0.0;  // ||rho + gamma f - beta||^2
  double E_gamma = 0.0;     // gamma*ke + theta_l2sq/2
  double D_gamma = 0.0;     // theta_l2sq/2 - gamma int rho f
  double rho_l2sq = 0.0;
  double mass = 0.0;
  double w_norm = 0.0;      // || divergence-free part of (rho - rho_s) grad f ||
  double ln_ratio = 0.0;
  std::vector<double> weak_tests;  // <u, lap(phi_k)> then <grad P + varrho grad f, phi_k>
};

struct DiagnosticsSeries {
  std::vector<std::string> weak_names;
  std::vector<DiagnosticsRecord> rows;
};

struct DiagnosticsAccumulator {
  bool has_prev = false;
  double prev_t = 0.0;
  double prev_grad_sq = 0.0;
  double diss_accum = 0.0;
};

/// Fixed low-wavenumber test fields, compactly supported in z.
std::vector<VectorField> build_test_bank(const Grid& g, int kmax = 4);

DiagnosticsRecord sample(const State& state, const State& prev,
                         const EquilibriumProfile& profile, const PotentialSpec& pot,
                         const Params& params, DiagnosticsAccumulator& accum,
                         const std::vector<VectorField>& test_bank = {});

double energy_identity_residual(const DiagnosticsSeries& series);
double gamma_identity_residual(const DiagnosticsSeries& series, double gamma);
double dgamma_bookkeeping_check(const DiagnosticsSeries& series, double gamma,
                                double beta);

struct ProfileGapCondition {
  double lhs = 0.0;  // 2 gamma (pe(0) - pe(t_end))
  double rhs = 0.0;  // theta_l2sq(0)
  double gap = 0.0;
  double theta_end = 0.0;
  bool settled = true;
};
ProfileGapCondition profile_gap_condition(const DiagnosticsSeries& series, double gamma,
                                       double beta);

/// <lap u, phi_k> (by moving the Laplacian onto phi_k) and
/// <grad P + (rho - rho_s) grad f, phi_k>.
std::vector<double> weak_convergence_surrogate(const State& state,
                                               const EquilibriumProfile& profile,
                                               const PotentialSpec& pot,
                                               const std::vector<VectorField>& bank);

void write_csv(const std::string& path, const DiagnosticsSeries& series);
DiagnosticsSeries read_csv(const std::string& path);

}  // namespace iins
