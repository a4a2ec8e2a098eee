#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "iins/config.hpp"
#include "iins/diagnostics.hpp"
#include "iins/flow.hpp"

namespace iins {

/// Built-in scenario configurations: rest (hydrostatic fixed point),
/// stable-relax (stably stratified relaxation), rt-unstable (heavy-over-light
/// transient), linear-converge (relaxation onto the linear profile).
Config scenario(const std::string& name);

/// IINS_OUTDIR replaces io.outdir; IINS_THREADS caps the kernel thread count.
void apply_env_overrides(Config& c);

/// Everything needed to run: the grid must stay at a stable address, so the
/// whole bundle lives behind a unique_ptr.
struct Setup {
  Grid grid;
  Config config;
  Params params;
  PotentialSpec pot;
  EquilibriumProfile profile;
  State initial;
};

std::unique_ptr<Setup> build_setup(const Config& c);

struct RunResult {
  RunSummary summary;
  DiagnosticsSeries series;
};

/// Advance to t_end writing config.ini, diagnostics.csv, run.meta, final.bin
/// and periodic snapshots under config.outdir.
RunResult run_to_files(Setup& setup, const State* restart = nullptr);

/// Aggregate verdicts for one or more run output directories.
/// Exit contract: 0 all pass, 1 check failure, 2 incomplete inputs, 3 solver
/// abort; the most severe condition wins (3 > 2 > 1).
int write_report(const std::vector<std::string>& dirs, std::ostream& out);

}  // namespace iins
