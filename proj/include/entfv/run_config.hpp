#pragma once

#include "entfv/schemes.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace entfv {

struct StudyConfig {
  std::vector<std::size_t> resolutions; // strictly increasing, >= 3 entries
  double beta = 1.5;                    // dt scales as (h / h_0)^beta
  double dt0 = 0.0;                     // dt at the coarsest level
};

/// Flat key=value run configuration. Unknown keys are rejected so a typo in
/// a study file cannot silently fall back to a default.
struct RunConfig {
  // mesh.*
  int dim = 1;
  std::size_t nx = 64;
  std::size_t ny = 1;
  double lx = 1.0;
  double ly = 1.0;
  // init.*
  std::string init_kind = "gaussian-bump"; // uniform | gaussian-bump
  double init_rho0 = 1.0;
  double init_e0 = 1.0;
  double init_amp_rho = 0.5;
  double init_amp_e = 0.25;
  double init_center_x = 0.5;
  double init_center_y = 0.5;
  double init_width = 0.1;
  // velocity.*
  std::string velocity_mode = "prescribed"; // prescribed | evolved_1d
  std::string velocity_field = "sine";      // zero | sine | sine2d
  double velocity_amplitude = 0.5;
  // scheme.*
  std::string scheme_kind = "explicit"; // explicit | implicit
  std::string strategy_rho = "upwind";
  std::string strategy_e = "upwind";
  double gamma = 1.4;
  // time.*
  double t_end = 1.0;
  double dt = 0.0; // > 0: fixed step; 0: CFL-driven (explicit only)
  long max_steps = 0;
  double cfl_safety = 0.5;
  double cfl_margin = 0.1;
  // stabilization.*
  bool stab_enabled = false;
  double stab_alpha = 1.5;
  double stab_q = 3.0;
  // solver.*
  double linear_tol = 1e-10;
  double picard_tol = 1e-9;
  int picard_max_iter = 100;
  // diagnostics.*
  double holder_p = 2.0;
  int modes = 8;
  bool bounds_enabled = true;
  // output.*
  std::string out_dir; // empty: no files written
  std::uint64_t seed = 42;
  // study.*
  StudyConfig study;

  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_string(const std::string& text);

  void validate() const;
  void validate_study() const;

  Mesh make_mesh() const;
  Mesh make_mesh_resolution(std::size_t n) const;
  SchemeConfig scheme_config() const;
  State initial_state(const Mesh& mesh) const;
  /// Sample the configured analytic velocity field at face centroids;
  /// boundary faces carry zero.
  FaceField prescribed_velocity(const Mesh& mesh) const;
};

} // namespace entfv
