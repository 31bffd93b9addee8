#include "entfv/harness.hpp"

#include "entfv/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace entfv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double weighted_abs_sum(const Mesh& mesh, const CellField& z) {
  double s = 0.0;
  for (std::size_t k = 0; k < mesh.n_cells(); ++k)
    s += mesh.cell(k).measure * std::fabs(z[k]);
  return s;
}

double field_min(const CellField& z) {
  double m = kInf;
  for (double v : z) m = std::min(m, v);
  return m;
}

struct CsvWriter {
  std::vector<std::string> rows;
  void add(long step, double t, const char* name, double value) {
    rows.push_back(std::to_string(step) + "," + fmt(t) + "," + name + "," +
                   fmt(value));
  }
  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << "step,time,name,value\n";
    for (const std::string& r : rows) out << r << "\n";
  }
};

nlohmann::ordered_json bounds_json(const BoundReport& report) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const BoundEntry& b : report) {
    nlohmann::ordered_json e;
    e["name"] = b.name;
    e["lhs"] = b.lhs;
    e["rhs"] = b.rhs;
    e["satisfied"] = b.satisfied;
    arr.push_back(e);
  }
  return arr;
}

} // namespace

RunSummary run(const RunConfig& cfg) {
  cfg.validate();
  const Mesh mesh = cfg.make_mesh();
  const SchemeConfig scheme = cfg.scheme_config();
  const bool implicit = cfg.scheme_kind == "implicit";
  const bool evolved = cfg.velocity_mode == "evolved_1d";
  const bool hypotheses =
      scheme.strategy_rho.kind != StrategyKind::centered &&
      scheme.strategy_e.kind != StrategyKind::centered;
  const double qconj = cfg.holder_p / (cfg.holder_p - 1.0);

  State state = cfg.initial_state(mesh);
  validate_state(mesh, state);
  const FaceField u_prescribed = state.u;

  RunSummary sum;
  sum.seed = cfg.seed;
  sum.initial_entropy = global_entropy(mesh, state.rho, state.e, scheme.gas);
  sum.mass_initial = 0.0;
  for (std::size_t k = 0; k < mesh.n_cells(); ++k)
    sum.mass_initial += mesh.cell(k).measure * state.rho[k];
  sum.min_rho = field_min(state.rho);
  sum.min_e = field_min(state.e);
  sum.max_entropy_residual = -kInf;
  sum.max_global_entropy_increase = -kInf;
  sum.min_sign_mass = kInf;
  sum.min_sign_energy = kInf;

  double m_run = 1.0;
  absorb_state(m_run, state);

  WeakNormSurrogate surr_delta_rm(mesh, cfg.modes);
  WeakNormSurrogate surr_delta_re(mesh, cfg.modes);
  WeakNormSurrogate surr_delta_sum(mesh, cfg.modes);
  WeakNormSurrogate surr_eta_r1(mesh, cfg.modes);
  double bvx_rho = 0.0, bvx_e = 0.0, bvt_rho = 0.0, bvt_e = 0.0;
  double l1_r_mass = 0.0, l1_r_energy = 0.0, l1_r01 = 0.0, l1_eta_r2 = 0.0;
  double u_norm_acc = 0.0;

  CsvWriter csv;
  csv.add(0, 0.0, "mass_total", sum.mass_initial);
  csv.add(0, 0.0, "global_entropy", sum.initial_entropy);
  csv.add(0, 0.0, "min_rho", sum.min_rho);
  csv.add(0, 0.0, "min_e", sum.min_e);

  double t = 0.0;
  double entropy_prev = sum.initial_entropy;
  double last_dt = 0.0;
  const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);

  while (t < cfg.t_end - t_eps &&
         (cfg.max_steps == 0 || sum.steps < cfg.max_steps)) {
    const double dt_cap = cfg.t_end - t;
    StepResult step;
    try {
      if (implicit) {
        const double dt_step = std::min(cfg.dt, dt_cap);
        step = implicit_step(mesh, state, u_prescribed, scheme, dt_step,
                             t + dt_step);
      } else {
        step = explicit_step(mesh, state, scheme, cfg.dt, dt_cap, t);
        if (evolved)
          step.state.u =
              momentum_step_1d(mesh, state, step.state.rho, scheme, step.dt);
      }
    } catch (const PositivityError& err) {
      throw PositivityError("step " + std::to_string(sum.steps + 1) + ": " +
                                err.what(),
                            err.cell(), sum.steps + 1);
    }
    const double dt = step.dt;
    if (sum.steps == 0) sum.dt_first = dt;
    sum.dt_max_seen = std::max(sum.dt_max_seen, dt);
    const double t_next = t + dt;

    // norms fed by the pre-step level
    bvx_rho += dt * bv_space_level(mesh, state.rho);
    bvx_e += dt * bv_space_level(mesh, state.e);
    bvt_rho += bv_time_pair(mesh, state.rho, step.state.rho);
    bvt_e += bv_time_pair(mesh, state.e, step.state.e);
    u_norm_acc += dt * w1q_level_sum(mesh, state.u, qconj);

    const StepDiagnostics diag =
        compute_step_diagnostics(mesh, state, step, scheme.gas, implicit);
    double res_max = -kInf;
    for (double v : diag.entropy_residual) res_max = std::max(res_max, v);
    sum.max_entropy_residual = std::max(sum.max_entropy_residual, res_max);

    const double entropy_now = diag.global_entropy;
    sum.max_global_entropy_increase =
        std::max(sum.max_global_entropy_increase, entropy_now - entropy_prev);

    csv.add(sum.steps + 1, t_next, "dt", dt);
    csv.add(sum.steps + 1, t_next, "entropy_residual_max", res_max);
    csv.add(sum.steps + 1, t_next, "global_entropy", entropy_now);
    double mass_now = 0.0;
    for (std::size_t k = 0; k < mesh.n_cells(); ++k)
      mass_now += mesh.cell(k).measure * step.state.rho[k];
    csv.add(sum.steps + 1, t_next, "mass_total", mass_now);
    csv.add(sum.steps + 1, t_next, "min_rho", field_min(step.state.rho));
    csv.add(sum.steps + 1, t_next, "min_e", field_min(step.state.e));

    if (implicit) {
      surr_delta_rm.add(diag.delta_rm, t_next, dt);
      surr_delta_re.add(diag.delta_re, t_next, dt);
      CellField both(mesh.n_cells());
      for (std::size_t k = 0; k < mesh.n_cells(); ++k)
        both[k] = diag.delta_rm[k] + diag.delta_re[k];
      surr_delta_sum.add(both, t_next, dt);
      csv.add(sum.steps + 1, t_next, "delta_rm_l1_level",
              weighted_abs_sum(mesh, diag.delta_rm));
      csv.add(sum.steps + 1, t_next, "delta_re_l1_level",
              weighted_abs_sum(mesh, diag.delta_re));
    } else {
      double sign_mass = kInf, sign_energy = kInf;
      for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        sign_mass = std::min(sign_mass,
                             diag.mass.r1[k] + diag.mass.r2[k] +
                                 diag.mass.r02[k]);
        sign_energy = std::min(sign_energy, diag.energy.r1[k] +
                                                diag.energy.r2[k] +
                                                diag.energy.r[k]);
      }
      sum.min_sign_mass = std::min(sum.min_sign_mass, sign_mass);
      sum.min_sign_energy = std::min(sum.min_sign_energy, sign_energy);
      l1_r_mass += dt * weighted_abs_sum(mesh, diag.mass.r);
      l1_r_energy += dt * weighted_abs_sum(mesh, diag.energy.r);
      l1_r01 += dt * weighted_abs_sum(mesh, diag.mass.r01);
      l1_eta_r2 += dt * weighted_abs_sum(mesh, diag.eta_r2);
      surr_eta_r1.add(diag.eta_r1, t_next, dt);

      csv.add(sum.steps + 1, t_next, "sign_mass_min", sign_mass);
      csv.add(sum.steps + 1, t_next, "sign_energy_min", sign_energy);
      csv.add(sum.steps + 1, t_next, "r_mass_l1_level",
              weighted_abs_sum(mesh, diag.mass.r));
      csv.add(sum.steps + 1, t_next, "r_energy_l1_level",
              weighted_abs_sum(mesh, diag.energy.r));
      csv.add(sum.steps + 1, t_next, "eta_r2_l1_level",
              weighted_abs_sum(mesh, diag.eta_r2));
    }

    absorb_state(m_run, step.state);
    sum.min_rho = std::min(sum.min_rho, field_min(step.state.rho));
    sum.min_e = std::min(sum.min_e, field_min(step.state.e));

    entropy_prev = entropy_now;
    state = std::move(step.state);
    t = t_next;
    ++sum.steps;
    last_dt = dt;
  }

  // trailing time level of the space norms and the velocity norm
  if (sum.steps > 0) {
    bvx_rho += last_dt * bv_space_level(mesh, state.rho);
    bvx_e += last_dt * bv_space_level(mesh, state.e);
    u_norm_acc += last_dt * w1q_level_sum(mesh, state.u, qconj);
  }

  sum.final_time = t;
  sum.final_entropy = global_entropy(mesh, state.rho, state.e, scheme.gas);
  sum.mass_final = 0.0;
  for (std::size_t k = 0; k < mesh.n_cells(); ++k)
    sum.mass_final += mesh.cell(k).measure * state.rho[k];

  BoundInputs in;
  in.gas = scheme.gas;
  in.m = m_run;
  in.h_max = mesh.h_max();
  in.h_underline = mesh.h_underline();
  in.c_m = mesh.regularity_cm();
  in.max_faces = mesh.max_faces_per_cell();
  in.dt = sum.dt_max_seen;
  in.holder_p = cfg.holder_p;
  in.implicit = implicit;
  in.hypotheses_hold = hypotheses;
  in.bvx_rho = bvx_rho;
  in.bvx_e = bvx_e;
  in.bvt_rho = bvt_rho;
  in.bvt_e = bvt_e;
  in.weak_delta_rm = surr_delta_rm.value(t);
  in.weak_delta_re = surr_delta_re.value(t);
  in.weak_delta_sum = surr_delta_sum.value(t);
  in.weak_eta_r1 = surr_eta_r1.value(t);
  in.l1_r_mass = l1_r_mass;
  in.l1_r_energy = l1_r_energy;
  in.l1_r01 = l1_r01;
  in.l1_eta_r2 = l1_eta_r2;
  in.u_norm_w1q = std::pow(u_norm_acc, 1.0 / qconj);
  sum.measured = in;

  if (cfg.bounds_enabled && sum.steps > 0) {
    sum.bounds = check_bounds(in);
    for (const BoundEntry& b : sum.bounds)
      if (!b.satisfied) sum.bounds_ok = false;
  }

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    csv.write(cfg.out_dir + "/diagnostics.csv");
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["steps"] = sum.steps;
    j["final_time"] = sum.final_time;
    j["m"] = in.m;
    nlohmann::ordered_json norms;
    norms["bvx_rho"] = in.bvx_rho;
    norms["bvx_e"] = in.bvx_e;
    norms["bvt_rho"] = in.bvt_rho;
    norms["bvt_e"] = in.bvt_e;
    norms["weak_delta_rm"] = in.weak_delta_rm;
    norms["weak_delta_re"] = in.weak_delta_re;
    norms["weak_delta_sum"] = in.weak_delta_sum;
    norms["weak_eta_r1"] = in.weak_eta_r1;
    norms["l1_r_mass"] = in.l1_r_mass;
    norms["l1_r_energy"] = in.l1_r_energy;
    norms["l1_r01"] = in.l1_r01;
    norms["l1_eta_r2"] = in.l1_eta_r2;
    norms["u_w1q"] = in.u_norm_w1q;
    j["norms"] = norms;
    j["bounds"] = bounds_json(sum.bounds);
    j["all_satisfied"] = sum.bounds_ok;
    std::ofstream out(cfg.out_dir + "/bound_report.json", std::ios::binary);
    if (!out)
      throw ConfigError("cannot write '" + cfg.out_dir + "/bound_report.json'");
    out << j.dump(2) << "\n";
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Refinement study
// ---------------------------------------------------------------------------

namespace {

double fit_slope_loglog(const std::vector<double>& h,
                        const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0;
  const std::size_t n = h.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(h[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / double(n), my = sy / double(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}

double ratio_max_min(const std::vector<double>& v) {
  double lo = kInf, hi = 0.0;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (hi == 0.0) return 1.0; // identically zero across levels
  return lo > 0.0 ? hi / lo : kInf;
}

} // namespace

StudyResult refinement_study(const RunConfig& cfg) {
  cfg.validate_study();
  StudyResult result;
  const double h0 = cfg.lx / double(cfg.study.resolutions.front());

  for (std::size_t res : cfg.study.resolutions) {
    RunConfig level = cfg;
    level.nx = res;
    const double h = cfg.lx / double(res);
    level.dt = cfg.study.dt0 * std::pow(h / h0, cfg.study.beta);
    level.study = {};
    if (!cfg.out_dir.empty())
      level.out_dir = cfg.out_dir + "/level_" + std::to_string(res);
    RunSummary s = run(level);

    StudyLevel sl;
    sl.resolution = res;
    sl.h = h;
    sl.dt = level.dt;
    sl.l1_eta_r2 = s.measured.l1_eta_r2;
    sl.weak_eta_r1 = s.measured.weak_eta_r1;
    sl.m = s.measured.m;
    sl.bvx_rho = s.measured.bvx_rho;
    sl.bvt_rho = s.measured.bvt_rho;
    sl.bvx_e = s.measured.bvx_e;
    sl.bvt_e = s.measured.bvt_e;
    sl.bounds_ok = s.bounds_ok;
    result.all_bounds_ok = result.all_bounds_ok && s.bounds_ok;
    result.levels.push_back(sl);
  }

  std::vector<double> hs, r1s, r2s, ms, bv[4];
  for (const StudyLevel& sl : result.levels) {
    hs.push_back(sl.h);
    r1s.push_back(sl.weak_eta_r1);
    r2s.push_back(sl.l1_eta_r2);
    ms.push_back(sl.m);
    bv[0].push_back(sl.bvx_rho);
    bv[1].push_back(sl.bvt_rho);
    bv[2].push_back(sl.bvx_e);
    bv[3].push_back(sl.bvt_e);
  }
  result.exact_zero_r1 =
      std::all_of(r1s.begin(), r1s.end(), [](double v) { return v == 0.0; });
  result.exact_zero_r2 =
      std::all_of(r2s.begin(), r2s.end(), [](double v) { return v == 0.0; });
  if (!result.exact_zero_r1) result.order_eta_r1 = fit_slope_loglog(hs, r1s);
  if (!result.exact_zero_r2) result.order_eta_r2 = fit_slope_loglog(hs, r2s);
  result.m_ratio = ratio_max_min(ms);
  result.bv_ratio = 1.0;
  for (const auto& series : bv)
    result.bv_ratio = std::max(result.bv_ratio, ratio_max_min(series));

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream csv(cfg.out_dir + "/study.csv", std::ios::binary);
    csv << "resolution,h,dt,l1_eta_r2,weak_eta_r1,m,bvx_rho,bvt_rho,bvx_e,"
           "bvt_e,bounds_ok\n";
    for (const StudyLevel& sl : result.levels)
      csv << sl.resolution << "," << fmt(sl.h) << "," << fmt(sl.dt) << ","
          << fmt(sl.l1_eta_r2) << "," << fmt(sl.weak_eta_r1) << ","
          << fmt(sl.m) << "," << fmt(sl.bvx_rho) << "," << fmt(sl.bvt_rho)
          << "," << fmt(sl.bvx_e) << "," << fmt(sl.bvt_e) << ","
          << (sl.bounds_ok ? 1 : 0) << "\n";

    nlohmann::ordered_json j;
    j["levels"] = nlohmann::ordered_json::array();
    for (const StudyLevel& sl : result.levels) {
      nlohmann::ordered_json e;
      e["resolution"] = sl.resolution;
      e["h"] = sl.h;
      e["dt"] = sl.dt;
      e["l1_eta_r2"] = sl.l1_eta_r2;
      e["weak_eta_r1"] = sl.weak_eta_r1;
      e["m"] = sl.m;
      j["levels"].push_back(e);
    }
    j["order_eta_r1"] =
        result.exact_zero_r1 ? "exact-zero"
                             : nlohmann::ordered_json(result.order_eta_r1);
    j["order_eta_r2"] =
        result.exact_zero_r2 ? "exact-zero"
                             : nlohmann::ordered_json(result.order_eta_r2);
    j["m_ratio"] = result.m_ratio;
    j["bv_ratio"] = result.bv_ratio;
    j["all_bounds_satisfied"] = result.all_bounds_ok;
    std::ofstream out(cfg.out_dir + "/study.json", std::ios::binary);
    out << j.dump(2) << "\n";
  }
  return result;
}

// ---------------------------------------------------------------------------
// Self test
// ---------------------------------------------------------------------------

namespace {

double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
double uni(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * u01(rng);
}
double logu(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uni(rng, std::log(lo), std::log(hi)));
}

double bisect_xkl(const ConvexFunction& phi, double a, double b) {
  if (a == b) return a;
  double lo = std::min(a, b), hi = std::max(a, b);
  auto g = [&](double x) {
    return (phi.eval(a) + phi.deriv(a) * (x - a)) -
           (phi.eval(b) + phi.deriv(b) * (x - b));
  };
  double glo = g(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((g(mid) >= 0.0) == (glo >= 0.0)) {
      lo = mid;
      glo = g(mid);
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct SuiteLog {
  std::ostream& out;
  int failures = 0;
  void report(const char* name, bool ok, const std::string& detail = "") {
    out << (ok ? "ok   " : "FAIL ") << name;
    if (!ok && !detail.empty()) out << ": " << detail;
    out << "\n";
    if (!ok) ++failures;
  }
};

} // namespace

int selftest(std::uint64_t seed, std::ostream& out) {
  SuiteLog log{out};
  std::mt19937_64 rng(seed);

  {
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double rho = logu(rng, 1e-3, 1e3);
      const double e = logu(rng, 1e-3, 1e3);
      const GasParameters gas{1.0 + uni(rng, 1e-6, 4.0)};
      const double r = std::fabs(entropy_identity_residual(rho, e, gas));
      worst = std::max(worst, r);
      ok = ok && r <= 1e-13;
    }
    log.report("entropy identity residual (1e4 samples, <= 1e-13)", ok,
               "worst " + std::to_string(worst));
  }

  {
    ConvexFunction fns[] = {phi_rho(), phi_e({1.4}),
                            {[](double z) { return z * z; },
                             [](double z) { return 2.0 * z; },
                             [](double) { return 2.0; }}};
    bool member = true, agree = true, mid = true;
    for (int f = 0; f < 3; ++f) {
      for (int i = 0; i < 10000; ++i) {
        // membership holds for arbitrary pairs
        {
          const double a = logu(rng, 1e-2, 1e2);
          const double b = logu(rng, 1e-2, 1e2);
          const double x = solve_xkl(fns[f], a, b);
          member = member && x >= std::min(a, b) && x <= std::max(a, b);
        }
        // oracle comparisons need pairs the solve can resolve
        double a, b;
        do {
          a = logu(rng, 1e-2, 1e2);
          b = logu(rng, 1e-2, 1e2);
        } while (std::fabs(a - b) <= 0.02 * std::max(a, b));
        const double x = solve_xkl(fns[f], a, b);
        const double ref = bisect_xkl(fns[f], a, b);
        agree = agree &&
                std::fabs(x - ref) <= 1e-10 * std::max(1.0, std::fabs(ref));
        if (f == 2)
          mid = mid && std::fabs(x - 0.5 * (a + b)) <=
                           1e-14 * std::max(1.0, std::fabs(a + b));
      }
    }
    log.report("tangent intersection: membership (3 x 1e4)", member);
    log.report("tangent intersection: bisection agreement <= 1e-10", agree);
    log.report("tangent intersection: quadratic case is the midpoint", mid);
  }

  {
    bool ok = true;
    ConvexFunction fns[] = {phi_rho(), phi_e({2.0})};
    for (const ConvexFunction& p : fns)
      for (int i = 0; i < 1000; ++i) {
        const double a = logu(rng, 0.1, 10.0);
        const double b = logu(rng, 0.1, 10.0);
        const double s = std::min(a, b) + u01(rng) * std::fabs(b - a);
        ok = ok && std::fabs(delta_phi(p, a, b, s) - delta_phi(p, b, a, s)) <=
                       1e-12;
      }
    log.report("face increment symmetry in K/L", ok);
  }

  {
    bool ok = true;
    for (const FaceStrategy& s :
         {FaceStrategy::upwind(), FaceStrategy::limited()})
      for (int i = 0; i < 2000; ++i) {
        const double a = logu(rng, 1e-2, 1e2);
        const double b = logu(rng, 1e-2, 1e2);
        const double u = uni(rng, -2.0, 2.0);
        const FaceValueRecord r = face_value(s, phi_rho(), a, b, u);
        ok = ok && r.value >= r.lo - 1e-14 && r.value <= r.hi + 1e-14;
      }
    log.report("face values satisfy their admissible intervals", ok);
  }

  {
    bool ok = true;
    for (int i = 0; i < 500; ++i) {
      const double ms = logu(rng, 0.1, 10.0);
      const double r = logu(rng, 0.1, 10.0);
      const double u = uni(rng, -3.0, 3.0);
      ok = ok && mass_flux(ms, r, u) == -mass_flux(ms, r, -u);
    }
    log.report("mass flux antisymmetry is exact", ok);
  }

  {
    Mesh mesh = Mesh::build_1d(8, 1.0);
    bool ok = true;
    for (double q : {2.0, 3.0, 4.0}) {
      FaceField u(mesh.n_faces(), 0.0);
      for (std::size_t f : mesh.interior_faces()) u[f] = uni(rng, -1.0, 1.0);
      const FaceField lap = q_laplacian_neg_1d(mesh, u, q);
      double lhs = 0.0;
      for (std::size_t f : mesh.interior_faces()) lhs += lap[f] * u[f];
      double rhs = 0.0;
      for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        const auto& fs = mesh.cell_faces(k);
        const std::size_t left =
            mesh.face(fs[0]).centroid[0] < mesh.face(fs[1]).centroid[0]
                ? fs[0]
                : fs[1];
        const std::size_t right = left == fs[0] ? fs[1] : fs[0];
        const double h = mesh.cell(k).diameter;
        rhs += h * std::pow(std::fabs(u[right] - u[left]) / h, q);
      }
      ok = ok && std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, rhs);
    }
    log.report("q-Laplacian summation-by-parts identity (q = 2, 3, 4)", ok);
  }

  {
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
      Mesh mesh = trial % 5 == 0 ? Mesh::build_2d(3, 3, 1.0, 1.0)
                                 : Mesh::build_1d(2 + trial % 9, 1.0);
      State s;
      s.rho.resize(mesh.n_cells());
      s.e.assign(mesh.n_cells(), 1.0);
      s.u.assign(mesh.n_faces(), 0.0);
      CellField z_n(mesh.n_cells()), z_np1(mesh.n_cells());
      FaceField z_sigma(mesh.n_faces(), 0.0);
      for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        s.rho[k] = uni(rng, 0.5, 2.0);
        z_n[k] = uni(rng, -1.0, 1.0);
        z_np1[k] = uni(rng, -1.0, 1.0);
      }
      update_pressure(s, {1.4});
      for (std::size_t f : mesh.interior_faces()) {
        s.u[f] = uni(rng, -0.5, 0.5);
        z_sigma[f] = uni(rng, -1.0, 1.0);
      }
      SchemeConfig cfg;
      const double dt = 0.05;
      MassStepResult m = explicit_mass_step(mesh, s, cfg, dt);
      const CellField gap = cons_noncons_gap(mesh, s.rho, m.rho, z_n, z_np1,
                                             z_sigma, m.records, s.u, dt);
      for (double g : gap) ok = ok && std::fabs(g) <= 1e-12;
    }
    log.report("conservative/non-conservative forms agree (100 configs)", ok);
  }

  {
    bool ok = true;
    for (const Mesh& mesh :
         {Mesh::build_1d(7, 2.0), Mesh::build_2d(3, 4, 1.5, 1.0)}) {
      double total = 0.0;
      for (const Cell& c : mesh.cells()) total += c.measure;
      ok = ok && std::fabs(total - mesh.domain_measure()) <=
                     1e-12 * mesh.domain_measure();
      for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        Vec2 acc{0.0, 0.0};
        for (std::size_t f : mesh.cell_faces(k)) {
          const Face& face = mesh.face(f);
          const double sgn = mesh.orientation(f, k);
          acc[0] += face.measure * sgn * face.normal[0];
          acc[1] += face.measure * sgn * face.normal[1];
        }
        ok = ok && std::fabs(acc[0]) <= 1e-12 && std::fabs(acc[1]) <= 1e-12;
      }
    }
    log.report("mesh partition and closure identities", ok);
  }

  {
    Mesh mesh = Mesh::build_1d(1, 1.0);
    FaceField u(mesh.n_faces(), 0.0);
    u[1] = 1.0;
    const double norm = velocity_norm_w1q(mesh, {u}, 1.0, 2.0);
    log.report("velocity norm single-cell value sqrt(2)",
               std::fabs(norm - std::sqrt(2.0)) <= 1e-13);
  }

  {
    SchemeConfig good;
    good.stabilization = {true, 1.5, 3.0};
    bool ok = true;
    try {
      good.validate();
    } catch (const std::exception&) {
      ok = false;
    }
    SchemeConfig bad;
    bad.stabilization = {true, 1.0, 2.0};
    bool rejected = false;
    try {
      bad.validate();
    } catch (const ConfigError&) {
      rejected = true;
    }
    log.report("stabilization exponent check (alpha < q - 1)", ok && rejected);
  }

  return log.failures;
}

} // namespace entfv
