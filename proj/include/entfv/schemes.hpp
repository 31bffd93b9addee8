#pragma once

#include "entfv/state.hpp"

#include <vector>

namespace entfv {

/// One record per mesh face; boundary entries are left default-initialized
/// (their fluxes vanish).
using FaceRecords = std::vector<FaceValueRecord>;

/// Evaluate the strategy on every interior face of `x` with velocities `u`.
FaceRecords compute_face_records(const Mesh& mesh, const CellField& x,
                                 const FaceField& u,
                                 const FaceStrategy& strategy,
                                 const ConvexFunction& phi);

struct MassStepResult {
  CellField rho;
  FaceRecords records; // rho face values at the flux level
};

struct EnergyStepResult {
  CellField e;
  FaceRecords records; // e face values at the flux level
};

/// rho_K^{n+1} = rho_K^n - (dt/|K|) sum_sigma F_{K,sigma}^n.
MassStepResult explicit_mass_step(const Mesh& mesh, const State& state,
                                  const SchemeConfig& cfg, double dt);

/// Internal-energy update against rho^{n+1}; the scheme inequality holds with
/// residual exactly |K| S_K^n.
EnergyStepResult explicit_energy_step(const Mesh& mesh, const State& state,
                                      const CellField& rho_np1,
                                      const FaceRecords& rho_records,
                                      const SchemeConfig& cfg, double dt,
                                      double t_n);

struct StepResult {
  State state;
  FaceRecords rho_records;
  FaceRecords e_records;
  double dt = 0.0;
};

/// Backward-Euler mass + internal-energy step with prescribed face velocities
/// u^{n+1}. Upwind strategies yield linear systems solved directly; other
/// strategies run a Picard iteration that freezes face values from the
/// previous iterate.
StepResult implicit_step(const Mesh& mesh, const State& state,
                         const FaceField& u_np1, const SchemeConfig& cfg,
                         double dt, double t_np1);

/// Largest dt such that the mass-side remainder split stays nonnegative,
/// scaled by cfg.cfl_safety. Worst-case second-derivative ratios are taken
/// over the stencil hull of rho^n widened by cfg.cfl_margin. +inf when no
/// face constrains the cell.
double cfl_dt_mass(const Mesh& mesh, const State& state,
                   const SchemeConfig& cfg);

/// Energy-side analogue; needs rho^{n+1} (the mass step runs first) and uses
/// the same mass fluxes the energy step will see.
double cfl_dt_energy(const Mesh& mesh, const State& state,
                     const CellField& rho_np1, const SchemeConfig& cfg);

/// Full explicit step: CFL selection (when dt_requested == 0), mass, energy,
/// pressure refresh. dt_max caps the step (e.g. at T - t).
StepResult explicit_step(const Mesh& mesh, const State& state,
                         const SchemeConfig& cfg, double dt_requested,
                         double dt_max, double t_n);

/// Per primal cell: tau_K = |delta_K u|^{q-2} delta_K u / h_K^{q-1}, where
/// delta_K u is the difference of the two face velocities (right minus left).
/// 1D only.
CellField stabilization_stress_1d(const Mesh& mesh, const FaceField& u,
                                  double q);

/// Per face: |D_sigma| (-Delta_q u)_sigma = tau_K - tau_L for the interior
/// face between K (left) and L (right); zero entries on boundary faces.
/// Satisfies sum_sigma |D_sigma| (-Delta_q u)_sigma u_sigma
///        = sum_K h_K |delta_K u / h_K|^q.  1D only.
FaceField q_laplacian_neg_1d(const Mesh& mesh, const FaceField& u, double q);

/// Explicit staggered momentum update on the dual cells of the interior
/// faces: upwind convection of u by averaged mass fluxes, pressure gradient
/// p_L - p_K, and the q-Laplacian stress scaled by h_M^alpha. Boundary
/// velocities stay zero. 1D only.
FaceField momentum_step_1d(const Mesh& mesh, const State& state,
                           const CellField& rho_np1, const SchemeConfig& cfg,
                           double dt);

/// Spatial part of the discrete L^q(W^{1,q}) velocity norm at one time level:
/// sum_K sum over ordered same-axis face pairs of |K| (|u_s - u_s'| / h_K)^q.
double w1q_level_sum(const Mesh& mesh, const FaceField& u, double q);

/// [ sum_n dt * w1q_level_sum(u^n) ]^{1/q}
double velocity_norm_w1q(const Mesh& mesh,
                         const std::vector<FaceField>& u_series, double dt,
                         double q);

} // namespace entfv
