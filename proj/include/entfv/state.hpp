#pragma once

#include "entfv/entropy.hpp"
#include "entfv/face_values.hpp"
#include "entfv/mesh.hpp"

#include <functional>
#include <vector>

namespace entfv {

using CellField = std::vector<double>;
/// Scalar per face; for velocities this is the normal component seen from
/// face.cells[0], so u_{K,sigma} = orientation(sigma, K) * value.
using FaceField = std::vector<double>;

struct State {
  CellField rho;
  CellField e;
  CellField p; // (gamma - 1) rho e, kept in sync by the steppers
  FaceField u; // zero on boundary faces
  long n = 0;  // time level
};

/// Refresh p from rho and e.
void update_pressure(State& s, GasParameters gas);

/// Throws PositivityError if any rho or e is non-positive; ConfigError on
/// size mismatches or nonzero boundary velocity.
void validate_state(const Mesh& mesh, const State& s);

struct StabilizationConfig {
  bool enabled = false;
  double alpha = 1.5;
  double q = 3.0;
};

struct SchemeConfig {
  GasParameters gas{1.4};
  FaceStrategy strategy_rho = FaceStrategy::upwind();
  FaceStrategy strategy_e = FaceStrategy::upwind();
  /// Nonnegative internal-energy source S_K(t); null means identically zero.
  std::function<double(std::size_t, double)> source_e;
  double cfl_safety = 0.5;  // in (0, 1]
  double cfl_margin = 0.10; // multiplicative widening of stencil hulls
  StabilizationConfig stabilization;
  double picard_tol = 1e-9;
  int picard_max_iter = 100;
  double linear_tol = 1e-10;

  /// cfl_safety in (0,1], q >= 2, and alpha < q - 1 when stabilization is on.
  void validate() const;
  /// S_K(t); throws ConfigError if the hook returns a negative value.
  double source(std::size_t cell, double t) const;
};

} // namespace entfv
