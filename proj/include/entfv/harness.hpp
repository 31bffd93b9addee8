#pragma once

#include "entfv/diagnostics.hpp"
#include "entfv/run_config.hpp"

#include <iosfwd>

namespace entfv {

struct RunSummary {
  long steps = 0;
  double final_time = 0.0;
  double dt_first = 0.0;
  double dt_max_seen = 0.0;
  double initial_entropy = 0.0;
  double final_entropy = 0.0;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  double min_rho = 0.0;
  double min_e = 0.0;
  /// max over steps and cells of the theorem residual
  double max_entropy_residual = 0.0;
  /// max over steps of sum |K| eta^{n+1} - sum |K| eta^n
  double max_global_entropy_increase = 0.0;
  /// explicit runs: min over steps/cells of the CFL-protected remainder sums
  double min_sign_mass = 0.0;
  double min_sign_energy = 0.0;
  BoundInputs measured;
  BoundReport bounds;
  bool bounds_ok = true;
  std::uint64_t seed = 0;
};

/// Execute one configured run, stream diagnostics, and (when output.dir is
/// set) write diagnostics.csv and bound_report.json. Positivity or solver
/// failures abort with the offending step and cell in the message.
RunSummary run(const RunConfig& cfg);

struct StudyLevel {
  std::size_t resolution = 0;
  double h = 0.0;
  double dt = 0.0;
  double l1_eta_r2 = 0.0;
  double weak_eta_r1 = 0.0;
  double m = 0.0;
  double bvx_rho = 0.0, bvt_rho = 0.0, bvx_e = 0.0, bvt_e = 0.0;
  bool bounds_ok = true;
};

struct StudyResult {
  std::vector<StudyLevel> levels;
  bool exact_zero_r1 = false; // remainder identically zero on every level
  bool exact_zero_r2 = false;
  double order_eta_r1 = 0.0; // log-log slope of the norm against h
  double order_eta_r2 = 0.0;
  double m_ratio = 1.0;  // max/min of M across levels
  double bv_ratio = 1.0; // worst max/min across the four BV norms
  bool all_bounds_ok = true;
};

/// Run the scheme on every ladder level with dt = dt0 (h/h_0)^beta, fit the
/// observed decay orders of the entropy remainders, and write study.csv /
/// study.json next to the per-level outputs.
StudyResult refinement_study(const RunConfig& cfg);

/// Property suites runnable from the CLI; prints one line per suite and
/// returns the number of failures.
int selftest(std::uint64_t seed, std::ostream& out);

} // namespace entfv
