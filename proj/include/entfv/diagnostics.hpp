#pragma once

#include "entfv/schemes.hpp"

#include <string>
#include <vector>

namespace entfv {

// ---------------------------------------------------------------------------
// Entropy residuals (the left sides of the discrete entropy inequalities)
// ---------------------------------------------------------------------------

/// Per cell: (|K|/dt)(eta_K^{n+1} - eta_K^n) + sum |sigma| eta_sigma u_{K,sigma},
/// with eta_sigma built from the face values the stepper actually used.
/// The implicit variant takes face values and velocities at level n+1, the
/// explicit one at level n. Neither includes a remainder.
CellField entropy_residual_implicit(const Mesh& mesh, const State& before,
                                    const StepResult& step, GasParameters gas);
CellField entropy_residual_explicit(const Mesh& mesh, const State& before,
                                    const StepResult& step, GasParameters gas);

/// sum_K |K| eta(rho_K, e_K)
double global_entropy(const Mesh& mesh, const CellField& rho,
                      const CellField& e, GasParameters gas);

// ---------------------------------------------------------------------------
// Remainders
// ---------------------------------------------------------------------------

struct ImplicitRemainders {
  CellField delta_rm; // (1/|K|) sum |sigma| (delta phi_rho)_sigma u_{K,sigma}
  CellField delta_re; // (1/|K|) sum (delta phi_e)_sigma F_{K,sigma}
};

/// Conservative remainders of the reduced-diffusion analysis, evaluated on
/// the fields and face records of one time level.
ImplicitRemainders remainder_implicit(const Mesh& mesh, const CellField& rho,
                                      const CellField& e,
                                      const FaceRecords& rho_records,
                                      const FaceRecords& e_records,
                                      const FaceField& u, GasParameters gas);

/// Splitting of phi'(rho^{n+1}) * [explicit mass balance] per cell. The mean
/// value phi''(xi) (rho^{n+1}-rho^n) equals phi'(rho^{n+1}) - phi'(rho^n)
/// exactly, so r, r1, r2, r01, r02 are the exact values of the split; r1_mid
/// and r1_lb are the midpoint evaluation and the rigorous interval lower
/// bound of r1.
struct ExplicitMassRemainders {
  CellField r;      // (phi'(rho^{n+1}) - phi'(rho^n)) sum F / |K|
  CellField r1;     // [phi'(rho^{n+1}) d - (phi(rho^{n+1}) - phi(rho^n))]/dt
  CellField r1_mid;
  CellField r1_lb;
  CellField r2;     // sum |sigma| [phi_K + phi'_K (rho_s - rho_K) - phi_s] u
  CellField r01;    // (phi' jump) rho_K^n sum |sigma| u / |K|
  CellField r02;    // (phi' jump) sum |sigma| (rho_s - rho_K) u / |K|
};

ExplicitMassRemainders remainder_explicit_mass(const Mesh& mesh,
                                               const State& before,
                                               const CellField& rho_np1,
                                               const FaceRecords& rho_records,
                                               double dt);

struct ExplicitEnergyRemainders {
  CellField r;  // (phi_e' jump) sum F (e_sigma - e_K) / |K|
  CellField r1; // exact, with the rho^{n+1} weight
  CellField r1_mid;
  CellField r1_lb;
  CellField r2; // sum F [phi_K + phi'_K (e_s - e_K) - phi_s] / |K|
};

ExplicitEnergyRemainders remainder_explicit_energy(
    const Mesh& mesh, const State& before, const CellField& rho_np1,
    const CellField& e_np1, const FaceRecords& rho_records,
    const FaceRecords& e_records, GasParameters gas, double dt);

/// Level-mixing term of the explicit entropy combination:
/// p_K^n [phi_e'(e_K^{n+1}) - phi_e'(e_K^n)] sum |sigma| u_{K,sigma}^n / |K|.
CellField pressure_cross_term(const Mesh& mesh, const State& before,
                              const CellField& e_np1, GasParameters gas);

/// Everything measured about one time step. Implicit steps fill the
/// conservative remainders; explicit steps fill the renormalization split,
/// the pressure cross term, and the two entropy-remainder aggregates
/// (eta_r1: conservative part on level-n face data; eta_r2: time-difference
/// parts plus the cross term).
struct StepDiagnostics {
  CellField entropy_residual;
  double global_entropy = 0.0; // at the new level
  CellField delta_rm, delta_re;
  ExplicitMassRemainders mass;
  ExplicitEnergyRemainders energy;
  CellField pressure_cross;
  CellField eta_r1;
  CellField eta_r2;
};

StepDiagnostics compute_step_diagnostics(const Mesh& mesh, const State& before,
                                         const StepResult& step,
                                         GasParameters gas,
                                         bool implicit_scheme);

/// Per-cell gap between the conservative and non-conservative forms of the
/// convection operator, given that rho_np1 solves the explicit mass balance
/// with the supplied records. Zero for any z fields and face values.
CellField cons_noncons_gap(const Mesh& mesh, const CellField& rho_n,
                           const CellField& rho_np1, const CellField& z_n,
                           const CellField& z_np1, const FaceField& z_sigma,
                           const FaceRecords& rho_records, const FaceField& u,
                           double dt);

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

/// sum_n dt sum_{interior sigma} |sigma| |z_L^n - z_K^n|
double norm_bv_space(const Mesh& mesh, const std::vector<CellField>& series,
                     double dt);
/// One level's face-jump sum (the inner sum above, no dt).
double bv_space_level(const Mesh& mesh, const CellField& z);

/// sum_n sum_K |K| |z_K^{n+1} - z_K^n|
double norm_bv_time(const Mesh& mesh, const std::vector<CellField>& series);
/// One step's contribution.
double bv_time_pair(const Mesh& mesh, const CellField& a, const CellField& b);

/// Finite-family surrogate of the weak (-1,1) norm: the pairing with
/// psi_{k(,l)}(x, t) = sin(k pi x / L_x)[ sin(l pi y / L_y) ] (1 - t / T),
/// normalized by the exact sup of |grad psi|, maximized over modes 1..count.
/// A guaranteed lower bound of the true dual norm. The envelope is affine in
/// t, so the pairings are accumulated as two moments and T is supplied at
/// evaluation time.
class WeakNormSurrogate {
public:
  WeakNormSurrogate(const Mesh& mesh, int mode_count);
  /// Accumulate dt * sum_K |K| z_K psi_spatial(x_K) at time t for every mode.
  void add(const CellField& z, double t, double dt);
  /// max over modes of |pairing with (1 - t/T)| / sup |grad psi|
  double value(double time_horizon) const;

private:
  const Mesh* mesh_;
  int modes_;
  std::vector<double> moment0_;
  std::vector<double> moment1_;
  std::vector<double> grad_sup_;
  std::vector<std::vector<double>> spatial_; // per mode, per cell
};

/// Series form: entry i is the field produced by step i, paired at
/// t = (i+1) dt, with T = dt * (len + 1) as the envelope horizon.
double norm_weak_m11(const Mesh& mesh, const std::vector<CellField>& series,
                     double dt, int mode_count);

// ---------------------------------------------------------------------------
// Bound report
// ---------------------------------------------------------------------------

/// Run-wide constants of the estimates: M bounds every rho, 1/rho, e, 1/e
/// and |u| of the run, and the derivative sups are taken over [1/M, M].
struct BoundConstants {
  double m = 1.0;
  double phi_rho_prime_inf = 0.0;
  double phi_e_prime_inf = 0.0;
  double phi_rho_second_inf = 0.0;
  double phi_e_second_inf = 0.0;

  static BoundConstants from_m(double m, GasParameters gas);
};

/// Grow m to cover a state (rho, 1/rho, e, 1/e, |u|; at least 1).
void absorb_state(double& m, const State& s);

struct BoundEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
};
using BoundReport = std::vector<BoundEntry>;

/// Everything check_bounds needs, measured on a completed run.
struct BoundInputs {
  GasParameters gas{1.4};
  double m = 1.0;
  double h_max = 0.0;
  double h_underline = 0.0;
  double c_m = 0.0;
  std::size_t max_faces = 2;
  double dt = 0.0;
  double holder_p = 2.0;
  bool implicit = false;
  bool hypotheses_hold = false; // strategies are upwind or limited
  double bvx_rho = 0.0, bvx_e = 0.0;
  double bvt_rho = 0.0, bvt_e = 0.0;
  // implicit runs
  double weak_delta_rm = 0.0, weak_delta_re = 0.0, weak_delta_sum = 0.0;
  // explicit runs
  double l1_r_mass = 0.0, l1_r_energy = 0.0, l1_r01 = 0.0;
  double weak_eta_r1 = 0.0, l1_eta_r2 = 0.0;
  double u_norm_w1q = 0.0; // exponent conjugate to holder_p
};

/// Evaluate every applicable lemma/theorem bound; lhs uses the measured
/// norms (weak norms via the surrogate, L1 norms with per-cell absolute
/// values), rhs the displayed constants. The constant of the velocity-norm
/// estimate is calibrated as C = 2 (max faces per cell)^2.
BoundReport check_bounds(const BoundInputs& in);

} // namespace entfv
