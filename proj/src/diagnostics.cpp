#include "entfv/diagnostics.hpp"

#include "entfv/errors.hpp"

#include <algorithm>
#include <cmath>

namespace entfv {

namespace {

double face_eta(const FaceValueRecord& rho_rec, const FaceValueRecord& e_rec,
                const ConvexFunction& pr, const ConvexFunction& pe) {
  return pr.eval(rho_rec.value) + rho_rec.value * pe.eval(e_rec.value);
}

CellField entropy_residual(const Mesh& mesh, const State& before,
                           const State& after, const FaceRecords& rho_records,
                           const FaceRecords& e_records, const FaceField& u,
                           double dt, GasParameters gas) {
  const ConvexFunction pr = phi_rho();
  const ConvexFunction pe = phi_e(gas);
  CellField out(mesh.n_cells());
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    const double eta_n = eta(before.rho[k], before.e[k], gas);
    const double eta_np1 = eta(after.rho[k], after.e[k], gas);
    double conv = 0.0;
    for (std::size_t f : mesh.cell_faces(k)) {
      if (mesh.face(f).boundary) continue;
      const double uks = mesh.orientation(f, k) * u[f];
      conv += mesh.face(f).measure *
              face_eta(rho_records[f], e_records[f], pr, pe) * uks;
    }
    out[k] = mesh.cell(k).measure / dt * (eta_np1 - eta_n) + conv;
  }
  return out;
}

} // namespace

CellField entropy_residual_implicit(const Mesh& mesh, const State& before,
                                    const StepResult& step,
                                    GasParameters gas) {
  return entropy_residual(mesh, before, step.state, step.rho_records,
                          step.e_records, step.state.u, step.dt, gas);
}

CellField entropy_residual_explicit(const Mesh& mesh, const State& before,
                                    const StepResult& step,
                                    GasParameters gas) {
  return entropy_residual(mesh, before, step.state, step.rho_records,
                          step.e_records, before.u, step.dt, gas);
}

double global_entropy(const Mesh& mesh, const CellField& rho,
                      const CellField& e, GasParameters gas) {
  double total = 0.0;
  for (std::size_t k = 0; k < mesh.n_cells(); ++k)
    total += mesh.cell(k).measure * eta(rho[k], e[k], gas);
  return total;
}

// ---------------------------------------------------------------------------
// Remainders
// ---------------------------------------------------------------------------

ImplicitRemainders remainder_implicit(const Mesh& mesh, const CellField& rho,
                                      const CellField& e,
                                      const FaceRecords& rho_records,
                                      const FaceRecords& e_records,
                                      const FaceField& u, GasParameters gas) {
  const ConvexFunction pr = phi_rho();
  const ConvexFunction pe = phi_e(gas);
  // Face increments depend only on the face; evaluate once per face.
  FaceField drho(mesh.n_faces(), 0.0), de(mesh.n_faces(), 0.0);
  for (std::size_t f : mesh.interior_faces()) {
    const Face& face = mesh.face(f);
    const std::size_t k = static_cast<std::size_t>(face.cells[0]);
    const std::size_t l = static_cast<std::size_t>(face.cells[1]);
    drho[f] = delta_phi(pr, rho[k], rho[l], rho_records[f].value);
    de[f] = delta_phi(pe, e[k], e[l], e_records[f].value);
  }
  ImplicitRemainders out;
  out.delta_rm.assign(mesh.n_cells(), 0.0);
  out.delta_re.assign(mesh.n_cells(), 0.0);
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    double rm = 0.0, re = 0.0;
    for (std::size_t f : mesh.cell_faces(k)) {
      if (mesh.face(f).boundary) continue;
      const double uks = mesh.orientation(f, k) * u[f];
      rm += mesh.face(f).measure * drho[f] * uks;
      re += de[f] * mass_flux(mesh.face(f).measure, rho_records[f].value, uks);
    }
    out.delta_rm[k] = rm / mesh.cell(k).measure;
    out.delta_re[k] = re / mesh.cell(k).measure;
  }
  return out;
}

ExplicitMassRemainders remainder_explicit_mass(const Mesh& mesh,
                                               const State& before,
                                               const CellField& rho_np1,
                                               const FaceRecords& rho_records,
                                               double dt) {
  const ConvexFunction phi = phi_rho();
  const std::size_t n = mesh.n_cells();
  ExplicitMassRemainders out;
  for (CellField* f :
       {&out.r, &out.r1, &out.r1_mid, &out.r1_lb, &out.r2, &out.r01, &out.r02})
    f->assign(n, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    const double measure = mesh.cell(k).measure;
    const double rk_n = before.rho[k];
    const double rk_np1 = rho_np1[k];
    const double d = rk_np1 - rk_n;

    double flux_sum = 0.0;  // sum F_{K,sigma}
    double div = 0.0;       // sum |sigma| u_{K,sigma}
    double dev_sum = 0.0;   // sum |sigma| (rho_s - rho_K) u_{K,sigma}
    double taylor_sum = 0.0;
    for (std::size_t f : mesh.cell_faces(k)) {
      if (mesh.face(f).boundary) continue;
      const double uks = mesh.orientation(f, k) * before.u[f];
      const double ms = mesh.face(f).measure;
      const double rs = rho_records[f].value;
      flux_sum += ms * rs * uks;
      div += ms * uks;
      dev_sum += ms * (rs - rk_n) * uks;
      taylor_sum += ms *
                    (phi.eval(rk_n) + phi.deriv(rk_n) * (rs - rk_n) -
                     phi.eval(rs)) *
                    uks;
    }

    // phi''(xi) d = phi'(rho^{n+1}) - phi'(rho^n) for the mean-value point.
    const double dprime = phi.deriv(rk_np1) - phi.deriv(rk_n);
    out.r[k] = dprime * flux_sum / measure;
    out.r01[k] = dprime * rk_n * div / measure;
    out.r02[k] = dprime * dev_sum / measure;
    out.r1[k] =
        (phi.deriv(rk_np1) * d - (phi.eval(rk_np1) - phi.eval(rk_n))) / dt;
    out.r1_mid[k] =
        0.5 / dt * phi.second(0.5 * (rk_n + rk_np1)) * d * d;
    out.r1_lb[k] =
        0.5 / dt * second_derivative_range(phi, rk_n, rk_np1).first * d * d;
    out.r2[k] = taylor_sum / measure;
  }
  return out;
}

ExplicitEnergyRemainders remainder_explicit_energy(
    const Mesh& mesh, const State& before, const CellField& rho_np1,
    const CellField& e_np1, const FaceRecords& rho_records,
    const FaceRecords& e_records, GasParameters gas, double dt) {
  const ConvexFunction phi = phi_e(gas);
  const std::size_t n = mesh.n_cells();
  ExplicitEnergyRemainders out;
  for (CellField* f : {&out.r, &out.r1, &out.r1_mid, &out.r1_lb, &out.r2})
    f->assign(n, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    const double measure = mesh.cell(k).measure;
    const double ek_n = before.e[k];
    const double ek_np1 = e_np1[k];
    const double d = ek_np1 - ek_n;

    double flux_dev = 0.0; // sum F (e_sigma - e_K)
    double taylor_sum = 0.0;
    for (std::size_t f : mesh.cell_faces(k)) {
      if (mesh.face(f).boundary) continue;
      const double uks = mesh.orientation(f, k) * before.u[f];
      const double fks =
          mass_flux(mesh.face(f).measure, rho_records[f].value, uks);
      const double es = e_records[f].value;
      flux_dev += fks * (es - ek_n);
      taylor_sum +=
          fks * (phi.eval(ek_n) + phi.deriv(ek_n) * (es - ek_n) - phi.eval(es));
    }

    const double dprime = phi.deriv(ek_np1) - phi.deriv(ek_n);
    out.r[k] = dprime * flux_dev / measure;
    out.r1[k] = rho_np1[k] *
                (phi.deriv(ek_np1) * d - (phi.eval(ek_np1) - phi.eval(ek_n))) /
                dt;
    out.r1_mid[k] = 0.5 / dt * rho_np1[k] *
                    phi.second(0.5 * (ek_n + ek_np1)) * d * d;
    out.r1_lb[k] = 0.5 / dt * rho_np1[k] *
                   second_derivative_range(phi, ek_n, ek_np1).first * d * d;
    out.r2[k] = taylor_sum / measure;
  }
  return out;
}

CellField pressure_cross_term(const Mesh& mesh, const State& before,
                              const CellField& e_np1, GasParameters gas) {
  const ConvexFunction phi = phi_e(gas);
  CellField out(mesh.n_cells(), 0.0);
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    double div = 0.0;
    for (std::size_t f : mesh.cell_faces(k)) {
      if (mesh.face(f).boundary) continue;
      div += mesh.face(f).measure * mesh.orientation(f, k) * before.u[f];
    }
    out[k] = before.p[k] * (phi.deriv(e_np1[k]) - phi.deriv(before.e[k])) *
             div / mesh.cell(k).measure;
  }
  return out;
}

StepDiagnostics compute_step_diagnostics(const Mesh& mesh, const State& before,
                                         const StepResult& step,
                                         GasParameters gas,
                                         bool implicit_scheme) {
  StepDiagnostics d;
  d.global_entropy = global_entropy(mesh, step.state.rho, step.state.e, gas);
  if (implicit_scheme) {
    d.entropy_residual = entropy_residual_implicit(mesh, before, step, gas);
    ImplicitRemainders rem =
        remainder_implicit(mesh, step.state.rho, step.state.e,
                           step.rho_records, step.e_records, step.state.u, gas);
    d.delta_rm = std::move(rem.delta_rm);
    d.delta_re = std::move(rem.delta_re);
    return d;
  }
  d.entropy_residual = entropy_residual_explicit(mesh, before, step, gas);
  d.mass = remainder_explicit_mass(mesh, before, step.state.rho,
                                   step.rho_records, step.dt);
  d.energy =
      remainder_explicit_energy(mesh, before, step.state.rho, step.state.e,
                                step.rho_records, step.e_records, gas, step.dt);
  d.pressure_cross = pressure_cross_term(mesh, before, step.state.e, gas);
  ImplicitRemainders level_n = remainder_implicit(
      mesh, before.rho, before.e, step.rho_records, step.e_records, before.u,
      gas);
  d.eta_r1.resize(mesh.n_cells());
  d.eta_r2.resize(mesh.n_cells());
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    d.eta_r1[k] = level_n.delta_rm[k] + level_n.delta_re[k];
    d.eta_r2[k] = d.mass.r[k] + d.energy.r[k] + d.pressure_cross[k];
  }
  return d;
}

CellField cons_noncons_gap(const Mesh& mesh, const CellField& rho_n,
                           const CellField& rho_np1, const CellField& z_n,
                           const CellField& z_np1, const FaceField& z_sigma,
                           const FaceRecords& rho_records, const FaceField& u,
                           double dt) {
  CellField gap(mesh.n_cells());
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    const double a = mesh.cell(k).measure / dt;
    double conservative = a * (rho_np1[k] * z_np1[k] - rho_n[k] * z_n[k]);
    double nonconservative = a * rho_np1[k] * (z_np1[k] - z_n[k]);
    for (std::size_t f : mesh.cell_faces(k)) {
      if (mesh.face(f).boundary) continue;
      const double uks = mesh.orientation(f, k) * u[f];
      const double fks =
          mass_flux(mesh.face(f).measure, rho_records[f].value, uks);
      conservative += fks * z_sigma[f];
      nonconservative += fks * (z_sigma[f] - z_n[k]);
    }
    gap[k] = conservative - nonconservative;
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

double bv_space_level(const Mesh& mesh, const CellField& z) {
  double sum = 0.0;
  for (std::size_t f : mesh.interior_faces()) {
    const Face& face = mesh.face(f);
    sum += face.measure * std::fabs(z[static_cast<std::size_t>(face.cells[1])] -
                                    z[static_cast<std::size_t>(face.cells[0])]);
  }
  return sum;
}

double norm_bv_space(const Mesh& mesh, const std::vector<CellField>& series,
                     double dt) {
  double total = 0.0;
  for (const CellField& z : series) total += dt * bv_space_level(mesh, z);
  return total;
}

double bv_time_pair(const Mesh& mesh, const CellField& a, const CellField& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < mesh.n_cells(); ++k)
    sum += mesh.cell(k).measure * std::fabs(b[k] - a[k]);
  return sum;
}

double norm_bv_time(const Mesh& mesh, const std::vector<CellField>& series) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < series.size(); ++i)
    total += bv_time_pair(mesh, series[i], series[i + 1]);
  return total;
}

WeakNormSurrogate::WeakNormSurrogate(const Mesh& mesh, int mode_count)
    : mesh_(&mesh), modes_(mode_count) {
  if (mode_count < 1) throw ConfigError("weak norm: mode_count must be >= 1");
  const Vec2 len = mesh.domain_lengths();
  if (mesh.dim() == 1) {
    for (int k = 1; k <= modes_; ++k) {
      spatial_.emplace_back(mesh.n_cells());
      for (std::size_t c = 0; c < mesh.n_cells(); ++c)
        spatial_.back()[c] =
            std::sin(k * M_PI * mesh.cell(c).centroid[0] / len[0]);
      grad_sup_.push_back(k * M_PI / len[0]);
    }
  } else {
    for (int k = 1; k <= modes_; ++k)
      for (int l = 1; l <= modes_; ++l) {
        spatial_.emplace_back(mesh.n_cells());
        for (std::size_t c = 0; c < mesh.n_cells(); ++c)
          spatial_.back()[c] =
              std::sin(k * M_PI * mesh.cell(c).centroid[0] / len[0]) *
              std::sin(l * M_PI * mesh.cell(c).centroid[1] / len[1]);
        grad_sup_.push_back(std::max(k * M_PI / len[0], l * M_PI / len[1]));
      }
  }
  moment0_.assign(spatial_.size(), 0.0);
  moment1_.assign(spatial_.size(), 0.0);
}

void WeakNormSurrogate::add(const CellField& z, double t, double dt) {
  for (std::size_t m = 0; m < spatial_.size(); ++m) {
    double sum = 0.0;
    for (std::size_t c = 0; c < mesh_->n_cells(); ++c)
      sum += mesh_->cell(c).measure * z[c] * spatial_[m][c];
    moment0_[m] += dt * sum;
    moment1_[m] += dt * t * sum;
  }
}

double WeakNormSurrogate::value(double time_horizon) const {
  const double t_cap = time_horizon > 0.0 ? time_horizon : 1.0;
  double best = 0.0;
  for (std::size_t m = 0; m < moment0_.size(); ++m)
    best = std::max(best,
                    std::fabs(moment0_[m] - moment1_[m] / t_cap) / grad_sup_[m]);
  return best;
}

double norm_weak_m11(const Mesh& mesh, const std::vector<CellField>& series,
                     double dt, int mode_count) {
  WeakNormSurrogate surrogate(mesh, mode_count);
  for (std::size_t i = 0; i < series.size(); ++i)
    surrogate.add(series[i], dt * static_cast<double>(i + 1), dt);
  return surrogate.value(dt * static_cast<double>(series.size() + 1));
}

// ---------------------------------------------------------------------------
// Bound report
// ---------------------------------------------------------------------------

BoundConstants BoundConstants::from_m(double m, GasParameters gas) {
  if (!(m >= 1.0)) throw ConfigError("bound constant M must be >= 1");
  BoundConstants c;
  c.m = m;
  const ConvexFunction pr = phi_rho();
  const ConvexFunction pe = phi_e(gas);
  c.phi_rho_prime_inf = deriv_abs_max(pr, 1.0 / m, m);
  c.phi_e_prime_inf = deriv_abs_max(pe, 1.0 / m, m);
  c.phi_rho_second_inf = second_derivative_range(pr, 1.0 / m, m).second;
  c.phi_e_second_inf = second_derivative_range(pe, 1.0 / m, m).second;
  return c;
}

void absorb_state(double& m, const State& s) {
  for (double r : s.rho) m = std::max({m, r, 1.0 / r});
  for (double e : s.e) m = std::max({m, e, 1.0 / e});
  for (double u : s.u) m = std::max(m, std::fabs(u));
}

BoundReport check_bounds(const BoundInputs& in) {
  const BoundConstants c = BoundConstants::from_m(in.m, in.gas);
  BoundReport report;
  auto push = [&report](const std::string& name, double lhs, double rhs) {
    report.push_back({name, lhs, rhs, lhs <= rhs});
  };

  if (in.implicit && in.hypotheses_hold) {
    push("implicit_delta_rm_weak_vs_bv",
         in.weak_delta_rm,
         3.0 * in.m * c.phi_rho_prime_inf * in.bvx_rho * in.h_max);
    push("implicit_delta_re_weak_vs_bv",
         in.weak_delta_re,
         3.0 * in.m * in.m * c.phi_e_prime_inf * in.bvx_e * in.h_max);
    push("implicit_delta_sum_weak_vs_bv",
         in.weak_delta_sum,
         3.0 * in.m *
             (c.phi_rho_prime_inf * in.bvx_rho +
              in.m * c.phi_e_prime_inf * in.bvx_e) *
             in.h_max);
  }

  if (!in.implicit) {
    push("explicit_mass_time_remainder_l1",
         in.l1_r_mass,
         in.m * in.m * c.phi_rho_second_inf * in.bvt_rho * in.dt /
             in.h_underline);
    push("explicit_energy_time_remainder_l1",
         in.l1_r_energy,
         in.m * in.m * c.phi_e_second_inf * in.bvt_e * in.dt /
             in.h_underline);
    // Velocity-norm estimate; the constant depends only on the maximal
    // number of faces, calibrated as 2 (max faces)^2.
    const double p = in.holder_p;
    const double cal = 2.0 * static_cast<double>(in.max_faces * in.max_faces);
    push("explicit_r01_l1_vs_velocity_norm",
         in.l1_r01,
         cal * in.c_m * std::pow(in.m, (2.0 * p - 1.0) / p) *
             c.phi_rho_second_inf * std::pow(in.bvt_rho, 1.0 / p) *
             in.u_norm_w1q * std::pow(in.dt, 1.0 / p));
    if (in.hypotheses_hold) {
      push("explicit_entropy_r1_weak_vs_bv",
           in.weak_eta_r1,
           3.0 * in.m *
               (c.phi_rho_prime_inf * in.bvx_rho +
                in.m * c.phi_e_prime_inf * in.bvx_e) *
               in.h_max);
      push("explicit_entropy_r2_l1",
           in.l1_eta_r2,
           in.m * in.m *
               (c.phi_rho_second_inf * in.bvt_rho +
                c.phi_e_second_inf * in.bvt_e) *
               in.dt / in.h_underline);
    }
  }
  return report;
}

} // namespace entfv
