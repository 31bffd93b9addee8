#include "entfv/schemes.hpp"

#include "entfv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace entfv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Dense LU with partial pivoting and iterative refinement. System sizes are
// the cell counts of desk-scale meshes.
// ---------------------------------------------------------------------------

struct DenseLU {
  std::size_t n;
  std::vector<double> a; // factored, row-major
  std::vector<std::size_t> piv;

  DenseLU(std::vector<double> matrix, std::size_t size)
      : n(size), a(std::move(matrix)), piv(size) {
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t best = col;
      double mag = std::fabs(a[col * n + col]);
      for (std::size_t r = col + 1; r < n; ++r) {
        const double m = std::fabs(a[r * n + col]);
        if (m > mag) {
          mag = m;
          best = r;
        }
      }
      if (mag == 0.0)
        throw SolverError("implicit solve: singular matrix at column " +
                          std::to_string(col));
      if (best != col) {
        for (std::size_t c = 0; c < n; ++c)
          std::swap(a[col * n + c], a[best * n + c]);
        std::swap(piv[col], piv[best]);
      }
      const double inv = 1.0 / a[col * n + col];
      for (std::size_t r = col + 1; r < n; ++r) {
        const double f = a[r * n + col] * inv;
        a[r * n + col] = f;
        for (std::size_t c = col + 1; c < n; ++c)
          a[r * n + c] -= f * a[col * n + c];
      }
    }
  }

  std::vector<double> solve(const std::vector<double>& b) const {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[piv[i]];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= a[i * n + j] * x[j];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) x[i] -= a[i * n + j] * x[j];
      x[i] /= a[i * n + i];
    }
    return x;
  }
};

std::vector<double> residual_of(const std::vector<double>& matrix,
                                const std::vector<double>& x,
                                const std::vector<double>& b) {
  const std::size_t n = b.size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    long double acc = b[i];
    for (std::size_t j = 0; j < n; ++j)
      acc -= static_cast<long double>(matrix[i * n + j]) * x[j];
    r[i] = static_cast<double>(acc);
  }
  return r;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

std::vector<double> solve_linear(const std::vector<double>& matrix,
                                 const std::vector<double>& b, double tol) {
  const std::size_t n = b.size();
  DenseLU lu(matrix, n);
  std::vector<double> x = lu.solve(b);
  const double target = tol * (max_abs(b) + 1.0);
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<double> r = residual_of(matrix, x, b);
    if (max_abs(r) <= target) return x;
    std::vector<double> dx = lu.solve(r);
    for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
  }
  const double res = max_abs(residual_of(matrix, x, b));
  if (res > target)
    throw SolverError("implicit solve: residual " + std::to_string(res) +
                          " above tolerance",
                      res);
  return x;
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

// Canonical face fluxes |sigma| x_sigma u_sigma (seen from face.cells[0]);
// zero on boundary faces.
FaceField face_fluxes(const Mesh& mesh, const FaceRecords& records,
                      const FaceField& u) {
  FaceField flux(mesh.n_faces(), 0.0);
  for (std::size_t f : mesh.interior_faces())
    flux[f] = mass_flux(mesh.face(f).measure, records[f].value, u[f]);
  return flux;
}

double cell_divergence(const Mesh& mesh, std::size_t k, const FaceField& u) {
  double div = 0.0;
  for (std::size_t f : mesh.cell_faces(k)) {
    if (mesh.face(f).boundary) continue;
    div += mesh.face(f).measure * mesh.orientation(f, k) * u[f];
  }
  return div;
}

// Hull of z over K and its face neighbors, widened multiplicatively.
std::pair<double, double> stencil_hull(const Mesh& mesh, const CellField& z,
                                       std::size_t k, double margin) {
  double lo = z[k], hi = z[k];
  for (std::size_t f : mesh.cell_faces(k)) {
    if (mesh.face(f).boundary) continue;
    const double v = z[mesh.neighbor(f, k)];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo / (1.0 + margin), hi * (1.0 + margin)};
}

// 1D connectivity by position: per-cell left/right face ids.
struct LineFaces {
  std::vector<std::size_t> left, right;
};

LineFaces line_faces(const Mesh& mesh) {
  if (mesh.dim() != 1) throw ConfigError("this operation requires a 1D mesh");
  LineFaces lf;
  lf.left.resize(mesh.n_cells());
  lf.right.resize(mesh.n_cells());
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    const auto& fs = mesh.cell_faces(k);
    const bool first_left =
        mesh.face(fs[0]).centroid[0] < mesh.cell(k).centroid[0];
    lf.left[k] = first_left ? fs[0] : fs[1];
    lf.right[k] = first_left ? fs[1] : fs[0];
  }
  return lf;
}

// +x component of a stored normal-velocity value.
double x_component(const Mesh& mesh, const FaceField& u, std::size_t f) {
  return u[f] * mesh.face(f).normal[0];
}

} // namespace

// ---------------------------------------------------------------------------
// State / config
// ---------------------------------------------------------------------------

void update_pressure(State& s, GasParameters gas) {
  s.p.resize(s.rho.size());
  for (std::size_t k = 0; k < s.rho.size(); ++k)
    s.p[k] = eos_pressure(s.rho[k], s.e[k], gas);
}

void validate_state(const Mesh& mesh, const State& s) {
  if (s.rho.size() != mesh.n_cells() || s.e.size() != mesh.n_cells() ||
      s.u.size() != mesh.n_faces())
    throw ConfigError("state sizes do not match the mesh");
  for (std::size_t k = 0; k < s.rho.size(); ++k) {
    if (!(s.rho[k] > 0.0))
      throw PositivityError(
          "non-positive density in cell " + std::to_string(k), k, s.n);
    if (!(s.e[k] > 0.0))
      throw PositivityError(
          "non-positive internal energy in cell " + std::to_string(k), k, s.n);
  }
  for (std::size_t f = 0; f < mesh.n_faces(); ++f)
    if (mesh.face(f).boundary && s.u[f] != 0.0)
      throw ConfigError("boundary face " + std::to_string(f) +
                        " carries a nonzero velocity");
}

void SchemeConfig::validate() const {
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
    throw ConfigError("cfl_safety must lie in (0, 1]");
  if (!(cfl_margin >= 0.0)) throw ConfigError("cfl_margin must be >= 0");
  if (!(gas.gamma > 1.0)) throw ConfigError("gamma must be > 1");
  if (stabilization.enabled) {
    if (!(stabilization.q >= 2.0))
      throw ConfigError("stabilization exponent q must be >= 2");
    if (!(stabilization.alpha >= 0.0))
      throw ConfigError("stabilization exponent alpha must be >= 0");
    if (!(stabilization.alpha < stabilization.q - 1.0))
      throw ConfigError("stabilization requires alpha < q - 1 (got alpha = " +
                        std::to_string(stabilization.alpha) +
                        ", q = " + std::to_string(stabilization.q) + ")");
  }
  if (!(picard_tol > 0.0) || picard_max_iter < 1 || !(linear_tol > 0.0))
    throw ConfigError("solver tolerances must be positive");
}

double SchemeConfig::source(std::size_t cell, double t) const {
  if (!source_e) return 0.0;
  const double s = source_e(cell, t);
  if (!(s >= 0.0))
    throw ConfigError("energy source must be nonnegative, got " +
                      std::to_string(s) + " in cell " + std::to_string(cell));
  return s;
}

// ---------------------------------------------------------------------------
// Face records
// ---------------------------------------------------------------------------

FaceRecords compute_face_records(const Mesh& mesh, const CellField& x,
                                 const FaceField& u,
                                 const FaceStrategy& strategy,
                                 const ConvexFunction& phi) {
  FaceRecords records(mesh.n_faces());
  for (std::size_t f : mesh.interior_faces()) {
    const Face& face = mesh.face(f);
    records[f] = face_value(strategy, phi,
                            x[static_cast<std::size_t>(face.cells[0])],
                            x[static_cast<std::size_t>(face.cells[1])], u[f]);
  }
  return records;
}

// ---------------------------------------------------------------------------
// Explicit steps
// ---------------------------------------------------------------------------

MassStepResult explicit_mass_step(const Mesh& mesh, const State& state,
                                  const SchemeConfig& cfg, double dt) {
  if (!(dt > 0.0)) throw ConfigError("explicit mass step: dt must be > 0");
  MassStepResult out;
  out.records = compute_face_records(mesh, state.rho, state.u,
                                     cfg.strategy_rho, phi_rho());
  const FaceField flux = face_fluxes(mesh, out.records, state.u);
  out.rho.resize(mesh.n_cells());
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    double sum = 0.0;
    for (std::size_t f : mesh.cell_faces(k))
      sum += mesh.orientation(f, k) * flux[f];
    out.rho[k] = state.rho[k] - dt / mesh.cell(k).measure * sum;
    if (!(out.rho[k] > 0.0))
      throw PositivityError("explicit mass step: density " +
                                std::to_string(out.rho[k]) + " in cell " +
                                std::to_string(k) + " (CFL breach?)",
                            k, state.n);
  }
  return out;
}

EnergyStepResult explicit_energy_step(const Mesh& mesh, const State& state,
                                      const CellField& rho_np1,
                                      const FaceRecords& rho_records,
                                      const SchemeConfig& cfg, double dt,
                                      double t_n) {
  if (!(dt > 0.0)) throw ConfigError("explicit energy step: dt must be > 0");
  EnergyStepResult out;
  out.records = compute_face_records(mesh, state.e, state.u, cfg.strategy_e,
                                     phi_e(cfg.gas));
  const FaceField flux = face_fluxes(mesh, rho_records, state.u);
  out.e.resize(mesh.n_cells());
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    double conv = 0.0;
    for (std::size_t f : mesh.cell_faces(k)) {
      if (mesh.face(f).boundary) continue;
      conv += mesh.orientation(f, k) * flux[f] * out.records[f].value;
    }
    const double measure = mesh.cell(k).measure;
    const double div = cell_divergence(mesh, k, state.u);
    const double src = cfg.source(k, t_n);
    const double val =
        state.rho[k] * state.e[k] -
        dt / measure * (conv + state.p[k] * div - measure * src);
    out.e[k] = val / rho_np1[k];
    if (!(out.e[k] > 0.0))
      throw PositivityError("explicit energy step: internal energy " +
                                std::to_string(out.e[k]) + " in cell " +
                                std::to_string(k) + " (CFL breach?)",
                            k, state.n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CFL bounds
// ---------------------------------------------------------------------------

double cfl_dt_mass(const Mesh& mesh, const State& state,
                   const SchemeConfig& cfg) {
  const ConvexFunction phi = phi_rho();
  double best = kInf;
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    const auto [lo, hi] = stencil_hull(mesh, state.rho, k, cfg.cfl_margin);
    const auto [s2min, s2max] = second_derivative_range(phi, lo, hi);
    const double worst_ratio = s2max * s2max / s2min;
    double den = 0.0;
    for (std::size_t f : mesh.cell_faces(k)) {
      if (mesh.face(f).boundary) continue;
      const double uks = mesh.orientation(f, k) * state.u[f];
      den += worst_ratio * mesh.face(f).measure * std::max(-uks, 0.0);
    }
    if (den > 0.0) best = std::min(best, mesh.cell(k).measure / den);
  }
  return cfg.cfl_safety * best;
}

double cfl_dt_energy(const Mesh& mesh, const State& state,
                     const CellField& rho_np1, const SchemeConfig& cfg) {
  const ConvexFunction phi = phi_e(cfg.gas);
  const FaceRecords rho_records = compute_face_records(
      mesh, state.rho, state.u, cfg.strategy_rho, phi_rho());
  const FaceField flux = face_fluxes(mesh, rho_records, state.u);
  double best = kInf;
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    const auto [lo, hi] = stencil_hull(mesh, state.e, k, cfg.cfl_margin);
    const auto [s2min, s2max] = second_derivative_range(phi, lo, hi);
    const double worst_ratio = s2max * s2max / s2min;
    double den = 0.0;
    for (std::size_t f : mesh.cell_faces(k)) {
      if (mesh.face(f).boundary) continue;
      const double fks = mesh.orientation(f, k) * flux[f];
      den += worst_ratio * std::max(-fks, 0.0);
    }
    if (den > 0.0)
      best = std::min(best, s2min * mesh.cell(k).measure * rho_np1[k] / den);
  }
  return cfg.cfl_safety * best;
}

// ---------------------------------------------------------------------------
// Full explicit step
// ---------------------------------------------------------------------------

StepResult explicit_step(const Mesh& mesh, const State& state,
                         const SchemeConfig& cfg, double dt_requested,
                         double dt_max, double t_n) {
  cfg.validate();
  const bool adaptive = !(dt_requested > 0.0);
  double dt = adaptive ? std::min(cfl_dt_mass(mesh, state, cfg), dt_max)
                       : std::min(dt_requested, dt_max);
  if (!(dt > 0.0) || std::isinf(dt))
    throw ConfigError("explicit step: no usable time step (dt = " +
                      std::to_string(dt) + ")");

  MassStepResult mass = explicit_mass_step(mesh, state, cfg, dt);
  if (adaptive) {
    // cfl_dt_energy needs rho^{n+1}, so the mass step runs first and is
    // redone if the energy bound asks for a smaller dt. The geometric shrink
    // forces progress when the bound itself moves with dt; it has a positive
    // floor since rho^{n+1} -> rho^n as dt -> 0.
    for (int pass = 0;; ++pass) {
      const double dte = cfl_dt_energy(mesh, state, mass.rho, cfg);
      if (dt <= dte * (1.0 + 1e-12)) break;
      if (pass >= 200)
        throw SolverError(
            "explicit step: energy CFL bound kept shrinking below the "
            "mass-step dt");
      dt = std::min(dte, 0.9 * dt);
      mass = explicit_mass_step(mesh, state, cfg, dt);
    }
  }
  EnergyStepResult energy =
      explicit_energy_step(mesh, state, mass.rho, mass.records, cfg, dt, t_n);

  StepResult out;
  out.state.rho = std::move(mass.rho);
  out.state.e = std::move(energy.e);
  out.state.u = state.u;
  out.state.n = state.n + 1;
  update_pressure(out.state, cfg.gas);
  out.rho_records = std::move(mass.records);
  out.e_records = std::move(energy.records);
  out.dt = dt;
  return out;
}

// ---------------------------------------------------------------------------
// Implicit step
// ---------------------------------------------------------------------------

namespace {

// Upwind mass system: (|K|/dt) rho_K + sum |sigma| rho_up u_{K,sigma} =
// (|K|/dt) rho_K^n.
CellField implicit_mass_upwind(const Mesh& mesh, const State& state,
                               const FaceField& u, const SchemeConfig& cfg,
                               double dt) {
  const std::size_t n = mesh.n_cells();
  std::vector<double> a(n * n, 0.0), b(n);
  for (std::size_t k = 0; k < n; ++k) {
    a[k * n + k] = mesh.cell(k).measure / dt;
    b[k] = mesh.cell(k).measure / dt * state.rho[k];
    for (std::size_t f : mesh.cell_faces(k)) {
      if (mesh.face(f).boundary) continue;
      const double uks = mesh.orientation(f, k) * u[f];
      const double coeff = mesh.face(f).measure * uks;
      if (uks >= 0.0)
        a[k * n + k] += coeff;
      else
        a[k * n + mesh.neighbor(f, k)] += coeff;
    }
  }
  return solve_linear(a, b, cfg.linear_tol);
}

// Upwind energy system against rho^{n+1} and the solved mass fluxes; the
// pressure term (gamma-1) rho_K e_K sum |sigma| u stays on the diagonal.
CellField implicit_energy_upwind(const Mesh& mesh, const State& state,
                                 const CellField& rho_np1,
                                 const FaceField& flux, const FaceField& u,
                                 const SchemeConfig& cfg, double dt,
                                 double t_np1) {
  const std::size_t n = mesh.n_cells();
  std::vector<double> a(n * n, 0.0), b(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double measure = mesh.cell(k).measure;
    const double div = cell_divergence(mesh, k, u);
    a[k * n + k] =
        measure / dt * rho_np1[k] + (cfg.gas.gamma - 1.0) * rho_np1[k] * div;
    b[k] = measure / dt * state.rho[k] * state.e[k] +
           measure * cfg.source(k, t_np1);
    for (std::size_t f : mesh.cell_faces(k)) {
      if (mesh.face(f).boundary) continue;
      const double fks = mesh.orientation(f, k) * flux[f];
      const double uks = mesh.orientation(f, k) * u[f];
      if (uks >= 0.0)
        a[k * n + k] += fks;
      else
        a[k * n + mesh.neighbor(f, k)] += fks;
    }
  }
  return solve_linear(a, b, cfg.linear_tol);
}

struct PicardField {
  CellField values;
  FaceRecords records;
};

// Fixed point with face values frozen from the previous iterate; each inner
// update is the diagonal solve of the balance with frozen fluxes. A last
// sweep re-evaluates the faces from the converged iterate so the returned
// field satisfies the balance exactly against the returned records.
PicardField picard_iterate(
    const SchemeConfig& cfg, const CellField& start,
    const std::function<FaceRecords(const CellField&)>& make_records,
    const std::function<CellField(const FaceRecords&)>& update,
    const char* label) {
  CellField cur = start;
  double diff = kInf;
  for (int it = 0; it < cfg.picard_max_iter; ++it) {
    FaceRecords records = make_records(cur);
    CellField next = update(records);
    diff = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k)
      diff = std::max(diff, std::fabs(next[k] - cur[k]));
    cur = std::move(next);
    if (diff <= cfg.picard_tol) {
      FaceRecords final_records = make_records(cur);
      CellField final_values = update(final_records);
      return {std::move(final_values), std::move(final_records)};
    }
  }
  throw SolverError(std::string("Picard iteration (") + label +
                        ") did not converge: last max update " +
                        std::to_string(diff),
                    diff);
}

} // namespace

StepResult implicit_step(const Mesh& mesh, const State& state,
                         const FaceField& u_np1, const SchemeConfig& cfg,
                         double dt, double t_np1) {
  cfg.validate();
  if (!(dt > 0.0)) throw ConfigError("implicit step: dt must be > 0");
  if (u_np1.size() != mesh.n_faces())
    throw ConfigError("implicit step: velocity field size mismatch");
  for (std::size_t f = 0; f < mesh.n_faces(); ++f)
    if (mesh.face(f).boundary && u_np1[f] != 0.0)
      throw ConfigError("implicit step: nonzero boundary velocity");

  StepResult out;
  out.dt = dt;

  CellField rho_np1;
  if (cfg.strategy_rho.kind == StrategyKind::upwind) {
    rho_np1 = implicit_mass_upwind(mesh, state, u_np1, cfg, dt);
    for (std::size_t k = 0; k < rho_np1.size(); ++k)
      if (!(rho_np1[k] > 0.0))
        throw PositivityError("implicit mass step: density " +
                                  std::to_string(rho_np1[k]) + " in cell " +
                                  std::to_string(k),
                              k, state.n);
    out.rho_records =
        compute_face_records(mesh, rho_np1, u_np1, cfg.strategy_rho, phi_rho());
  } else {
    auto make = [&](const CellField& x) {
      return compute_face_records(mesh, x, u_np1, cfg.strategy_rho, phi_rho());
    };
    auto update = [&](const FaceRecords& records) {
      const FaceField flux = face_fluxes(mesh, records, u_np1);
      CellField next(mesh.n_cells());
      for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        double sum = 0.0;
        for (std::size_t f : mesh.cell_faces(k))
          sum += mesh.orientation(f, k) * flux[f];
        next[k] = state.rho[k] - dt / mesh.cell(k).measure * sum;
        if (!(next[k] > 0.0))
          throw PositivityError("implicit mass iteration: density " +
                                    std::to_string(next[k]) + " in cell " +
                                    std::to_string(k),
                                k, state.n);
      }
      return next;
    };
    PicardField res = picard_iterate(cfg, state.rho, make, update, "mass");
    rho_np1 = std::move(res.values);
    out.rho_records = std::move(res.records);
  }

  const FaceField flux = face_fluxes(mesh, out.rho_records, u_np1);
  CellField e_np1;
  if (cfg.strategy_e.kind == StrategyKind::upwind) {
    e_np1 = implicit_energy_upwind(mesh, state, rho_np1, flux, u_np1, cfg, dt,
                                   t_np1);
    for (std::size_t k = 0; k < e_np1.size(); ++k)
      if (!(e_np1[k] > 0.0))
        throw PositivityError("implicit energy step: internal energy " +
                                  std::to_string(e_np1[k]) + " in cell " +
                                  std::to_string(k),
                              k, state.n);
    out.e_records = compute_face_records(mesh, e_np1, u_np1, cfg.strategy_e,
                                         phi_e(cfg.gas));
  } else {
    std::vector<double> den(mesh.n_cells());
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
      const double div = cell_divergence(mesh, k, u_np1);
      den[k] = mesh.cell(k).measure / dt * rho_np1[k] +
               (cfg.gas.gamma - 1.0) * rho_np1[k] * div;
      if (!(den[k] > 0.0))
        throw PositivityError(
            "implicit energy step: non-positive diagonal in cell " +
                std::to_string(k),
            k, state.n);
    }
    auto make = [&](const CellField& x) {
      return compute_face_records(mesh, x, u_np1, cfg.strategy_e,
                                  phi_e(cfg.gas));
    };
    auto update = [&](const FaceRecords& records) {
      CellField next(mesh.n_cells());
      for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        double conv = 0.0;
        for (std::size_t f : mesh.cell_faces(k)) {
          if (mesh.face(f).boundary) continue;
          conv += mesh.orientation(f, k) * flux[f] * records[f].value;
        }
        const double measure = mesh.cell(k).measure;
        next[k] = (measure / dt * state.rho[k] * state.e[k] - conv +
                   measure * cfg.source(k, t_np1)) /
                  den[k];
        if (!(next[k] > 0.0))
          throw PositivityError("implicit energy iteration: internal energy " +
                                    std::to_string(next[k]) + " in cell " +
                                    std::to_string(k),
                                k, state.n);
      }
      return next;
    };
    PicardField res = picard_iterate(cfg, state.e, make, update, "energy");
    e_np1 = std::move(res.values);
    out.e_records = std::move(res.records);
  }

  out.state.rho = std::move(rho_np1);
  out.state.e = std::move(e_np1);
  out.state.u = u_np1;
  out.state.n = state.n + 1;
  update_pressure(out.state, cfg.gas);
  return out;
}

// ---------------------------------------------------------------------------
// 1D staggered momentum
// ---------------------------------------------------------------------------

CellField stabilization_stress_1d(const Mesh& mesh, const FaceField& u,
                                  double q) {
  const LineFaces lf = line_faces(mesh);
  CellField tau(mesh.n_cells());
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    const double du =
        x_component(mesh, u, lf.right[k]) - x_component(mesh, u, lf.left[k]);
    const double h = mesh.cell(k).diameter;
    tau[k] = std::pow(std::fabs(du), q - 2.0) * du / std::pow(h, q - 1.0);
  }
  return tau;
}

FaceField q_laplacian_neg_1d(const Mesh& mesh, const FaceField& u, double q) {
  const CellField tau = stabilization_stress_1d(mesh, u, q);
  FaceField out(mesh.n_faces(), 0.0);
  for (std::size_t f : mesh.interior_faces()) {
    const Face& face = mesh.face(f);
    const std::size_t c0 = static_cast<std::size_t>(face.cells[0]);
    const std::size_t c1 = static_cast<std::size_t>(face.cells[1]);
    const bool c0_left = mesh.cell(c0).centroid[0] < mesh.cell(c1).centroid[0];
    out[f] = c0_left ? tau[c0] - tau[c1] : tau[c1] - tau[c0];
  }
  return out;
}

FaceField momentum_step_1d(const Mesh& mesh, const State& state,
                           const CellField& rho_np1, const SchemeConfig& cfg,
                           double dt) {
  const LineFaces lf = line_faces(mesh);
  const FaceRecords records = compute_face_records(
      mesh, state.rho, state.u, cfg.strategy_rho, phi_rho());
  const FaceField flux = face_fluxes(mesh, records, state.u);

  // Rightward dual mass flux through the dual face at each cell center: the
  // mean of the two primal face fluxes, which makes the dual cells satisfy
  // their own discrete mass balance.
  CellField gbar(mesh.n_cells());
  for (std::size_t k = 0; k < mesh.n_cells(); ++k)
    gbar[k] = 0.5 * (flux[lf.left[k]] + flux[lf.right[k]]);

  CellField tau;
  double stab_scale = 0.0;
  if (cfg.stabilization.enabled) {
    tau = stabilization_stress_1d(mesh, state.u, cfg.stabilization.q);
    stab_scale = std::pow(mesh.h_max(), cfg.stabilization.alpha);
  }

  // Upwinded velocity at the dual face sitting on cell c, between the
  // velocities of c's own faces.
  auto dual_face_velocity = [&](std::size_t c) {
    return gbar[c] >= 0.0 ? x_component(mesh, state.u, lf.left[c])
                          : x_component(mesh, state.u, lf.right[c]);
  };

  FaceField out(mesh.n_faces(), 0.0);
  for (std::size_t f : mesh.interior_faces()) {
    const Face& face = mesh.face(f);
    const std::size_t c0 = static_cast<std::size_t>(face.cells[0]);
    const std::size_t c1 = static_cast<std::size_t>(face.cells[1]);
    const bool c0_left = mesh.cell(c0).centroid[0] < mesh.cell(c1).centroid[0];
    const std::size_t kl = c0_left ? c0 : c1;
    const std::size_t kr = c0_left ? c1 : c0;

    const double dual = 0.5 * (mesh.cell(kl).measure + mesh.cell(kr).measure);
    const double rb_n = (mesh.cell(kl).measure * state.rho[kl] +
                         mesh.cell(kr).measure * state.rho[kr]) /
                        (2.0 * dual);
    const double rb_np1 = (mesh.cell(kl).measure * rho_np1[kl] +
                           mesh.cell(kr).measure * rho_np1[kr]) /
                          (2.0 * dual);
    if (!(rb_np1 > 0.0))
      throw PositivityError(
          "momentum step: non-positive dual density at face " +
              std::to_string(f),
          f, state.n);

    const double conv =
        gbar[kr] * dual_face_velocity(kr) - gbar[kl] * dual_face_velocity(kl);
    const double pgrad = state.p[kr] - state.p[kl];
    const double stab =
        cfg.stabilization.enabled ? stab_scale * (tau[kl] - tau[kr]) : 0.0;

    const double unew = (rb_n * x_component(mesh, state.u, f) -
                         dt / dual * (conv + pgrad + stab)) /
                        rb_np1;
    out[f] = unew * face.normal[0]; // back to the stored orientation
  }
  return out;
}

// ---------------------------------------------------------------------------
// Velocity norm
// ---------------------------------------------------------------------------

double w1q_level_sum(const Mesh& mesh, const FaceField& u, double q) {
  double total = 0.0;
  std::vector<double> comps;
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    const double h = mesh.cell(k).diameter;
    const double measure = mesh.cell(k).measure;
    for (int axis = 0; axis < mesh.dim(); ++axis) {
      comps.clear();
      for (std::size_t f : mesh.cell_faces(k)) {
        const Face& face = mesh.face(f);
        if (std::fabs(face.normal[static_cast<std::size_t>(axis)]) > 0.5)
          comps.push_back(u[f] * face.normal[static_cast<std::size_t>(axis)]);
      }
      // ordered pairs: (i, j) and (j, i) contribute equally, (i, i) nothing
      for (std::size_t i = 0; i < comps.size(); ++i)
        for (std::size_t j = i + 1; j < comps.size(); ++j)
          total += 2.0 * measure *
                   std::pow(std::fabs(comps[i] - comps[j]) / h, q);
    }
  }
  return total;
}

double velocity_norm_w1q(const Mesh& mesh,
                         const std::vector<FaceField>& u_series, double dt,
                         double q) {
  double acc = 0.0;
  for (const FaceField& u : u_series) acc += dt * w1q_level_sum(mesh, u, q);
  return std::pow(acc, 1.0 / q);
}

} // namespace entfv
