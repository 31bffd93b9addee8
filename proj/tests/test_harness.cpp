#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "entfv/errors.hpp"
#include "entfv/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace entfv;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig base_explicit() {
  return RunConfig::parse_string(R"(
    mesh.dim = 1
    mesh.nx = 32
    mesh.lx = 1.0
    init.kind = gaussian-bump
    velocity.field = sine
    velocity.amplitude = 0.5
    scheme.kind = explicit
    scheme.strategy_rho = upwind
    scheme.strategy_e = upwind
    time.t_end = 10.0
    time.max_steps = 40
    time.cfl_safety = 0.5
  )");
}

} // namespace

TEST_CASE("config parsing: unknown keys are rejected") {
  CHECK_THROWS_AS(RunConfig::parse_string("mesh.nx = 8\nmesh.typo = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("mesh.nx ="), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("just some words"), ConfigError);
}

TEST_CASE("config parsing: comments, types, lists") {
  RunConfig cfg = RunConfig::parse_string(R"(
    # a comment
    mesh.nx = 16        # trailing comment
    scheme.gamma = 1.67
    stabilization.enabled = true
    study.resolutions = 8, 16, 32
    seed = 7
  )");
  CHECK(cfg.nx == 16);
  CHECK(cfg.gamma == doctest::Approx(1.67));
  CHECK(cfg.stab_enabled);
  CHECK(cfg.study.resolutions == std::vector<std::size_t>{8, 16, 32});
  CHECK(cfg.seed == 7);
}

TEST_CASE("config validation catches bad combinations") {
  RunConfig cfg = base_explicit();
  cfg.scheme_kind = "implicit";
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError); // implicit needs fixed dt
  cfg.dt = 0.01;
  cfg.validate();
  cfg.velocity_field = "sine2d";
  CHECK_THROWS_AS(cfg.validate(), ConfigError); // sine2d needs 2D
  cfg.velocity_field = "sine";
  cfg.init_kind = "uniform";
  cfg.init_rho0 = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("uniform data with zero velocity is a global fixed point") {
  for (const char* kind : {"explicit", "implicit"}) {
    RunConfig cfg = RunConfig::parse_string(R"(
      mesh.dim = 1
      mesh.nx = 8
      init.kind = uniform
      init.rho0 = 1.3
      init.e0 = 0.9
      velocity.field = zero
      time.t_end = 0.5
      time.dt = 0.05
    )");
    cfg.scheme_kind = kind;
    RunSummary s = run(cfg);
    CHECK(s.steps == 10);
    CHECK(s.final_entropy == doctest::Approx(s.initial_entropy).epsilon(1e-13));
    CHECK(s.mass_final == doctest::Approx(s.mass_initial).epsilon(1e-14));
    CHECK(std::fabs(s.max_entropy_residual) <= 1e-11);
  }
}

TEST_CASE("t_end = 0 produces zero steps and echoes the initial entropy") {
  RunConfig cfg = base_explicit();
  cfg.t_end = 0.0;
  cfg.max_steps = 0;
  RunSummary s = run(cfg);
  CHECK(s.steps == 0);
  CHECK(s.final_entropy == s.initial_entropy);
}

TEST_CASE("explicit upwind sine run completes under CFL with safety 0.5") {
  // regression of the desk-scale positivity check
  RunConfig cfg = base_explicit();
  cfg.max_steps = 120;
  RunSummary s = run(cfg);
  CHECK(s.steps == 120);
  CHECK(s.min_rho > 0.0);
  CHECK(s.min_e > 0.0);
  CHECK(s.min_sign_mass >= -1e-12);
  CHECK(s.min_sign_energy >= -1e-12);
  CHECK(s.bounds_ok);
  CHECK(std::fabs(s.mass_final - s.mass_initial) <= 1e-12 * s.mass_initial);
}

TEST_CASE("implicit runs keep the entropy monotone and the bounds satisfied") {
  RunConfig cfg = RunConfig::parse_string(R"(
    mesh.dim = 1
    mesh.nx = 32
    init.kind = gaussian-bump
    velocity.field = sine
    scheme.kind = implicit
    scheme.strategy_rho = limited
    scheme.strategy_e = limited
    time.t_end = 0.25
    time.dt = 0.015625
  )");
  RunSummary s = run(cfg);
  CHECK(s.steps == 16);
  CHECK(s.max_global_entropy_increase <= 1e-8);
  CHECK(s.bounds_ok);
}

TEST_CASE("outputs are written and byte-identical across runs") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "entfv_determinism";
  fs::remove_all(dir);

  RunConfig cfg = base_explicit();
  cfg.max_steps = 25;
  cfg.out_dir = (dir / "a").string();
  run(cfg);
  cfg.out_dir = (dir / "b").string();
  run(cfg);

  const std::string csv_a = slurp((dir / "a" / "diagnostics.csv").string());
  const std::string csv_b = slurp((dir / "b" / "diagnostics.csv").string());
  CHECK(csv_a == csv_b);
  CHECK(csv_a.rfind("step,time,name,value\n", 0) == 0);
  const std::string json_a = slurp((dir / "a" / "bound_report.json").string());
  const std::string json_b = slurp((dir / "b" / "bound_report.json").string());
  CHECK(json_a == json_b);
  CHECK(json_a.find("\"satisfied\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("2D Cartesian run: CFL stepping, conservation, bounds") {
  RunConfig cfg = RunConfig::parse_string(R"(
    mesh.dim = 2
    mesh.nx = 10
    mesh.ny = 8
    mesh.lx = 1.0
    mesh.ly = 1.0
    init.kind = gaussian-bump
    init.amp_rho = 0.4
    init.amp_e = 0.2
    init.width = 0.15
    velocity.field = sine2d
    velocity.amplitude = 0.4
    scheme.kind = explicit
    scheme.strategy_rho = limited
    scheme.strategy_e = limited
    time.t_end = 10.0
    time.max_steps = 40
    time.cfl_safety = 0.5
  )");
  RunSummary s = run(cfg);
  CHECK(s.steps == 40);
  CHECK(s.min_rho > 0.0);
  CHECK(s.min_e > 0.0);
  CHECK(std::fabs(s.mass_final - s.mass_initial) <= 1e-12 * s.mass_initial);
  CHECK(s.bounds_ok);
}

TEST_CASE("momentum-driven runs evolve the velocity and stay positive") {
  RunConfig cfg = RunConfig::parse_string(R"(
    mesh.dim = 1
    mesh.nx = 24
    init.kind = gaussian-bump
    velocity.mode = evolved_1d
    velocity.field = sine
    velocity.amplitude = 0.3
    scheme.kind = explicit
    stabilization.enabled = true
    stabilization.alpha = 1.5
    stabilization.q = 3
    time.t_end = 0.2
    time.dt = 0.004
  )");
  RunSummary s = run(cfg);
  CHECK(s.steps == 50);
  CHECK(s.min_rho > 0.0);
  CHECK(s.min_e > 0.0);
}

TEST_CASE("refinement study fits decay orders on a tiny ladder") {
  RunConfig cfg = RunConfig::parse_string(R"(
    mesh.dim = 1
    mesh.nx = 8
    init.kind = gaussian-bump
    velocity.field = sine
    scheme.kind = explicit
    scheme.strategy_rho = limited
    scheme.strategy_e = limited
    time.t_end = 0.1
    study.resolutions = 8, 16, 32
    study.beta = 1.5
    study.dt0 = 0.01
  )");
  StudyResult r = refinement_study(cfg);
  REQUIRE(r.levels.size() == 3);
  CHECK(!r.exact_zero_r2);
  CHECK(r.order_eta_r2 > 0.0); // decays with h
  CHECK(r.m_ratio < 2.0);
  CHECK(r.all_bounds_ok);
}

TEST_CASE("beta = 1 ladder keeps dt / h_underline constant") {
  // The right side of the time-type remainder bound scales with
  // dt / h_underline, so halving h at beta = 1 leaves it unchanged.
  RunConfig cfg = RunConfig::parse_string(R"(
    mesh.dim = 1
    mesh.nx = 8
    init.kind = gaussian-bump
    velocity.field = sine
    scheme.kind = explicit
    time.t_end = 0.05
    study.resolutions = 8, 16, 32
    study.beta = 1.0
    study.dt0 = 0.005
  )");
  StudyResult r = refinement_study(cfg);
  std::vector<double> ratios;
  for (const StudyLevel& l : r.levels) {
    Mesh mesh = Mesh::build_1d(l.resolution, 1.0);
    ratios.push_back(l.dt / mesh.h_underline());
  }
  for (double v : ratios)
    CHECK(v == doctest::Approx(ratios.front()).epsilon(1e-12));
}

TEST_CASE("refinement study on uniform data reports exact zero") {
  RunConfig cfg = RunConfig::parse_string(R"(
    mesh.dim = 1
    mesh.nx = 8
    init.kind = uniform
    velocity.field = zero
    scheme.kind = explicit
    time.t_end = 0.05
    time.dt = 0.01
    study.resolutions = 8, 16, 32
    study.beta = 1.0
    study.dt0 = 0.01
  )");
  StudyResult r = refinement_study(cfg);
  CHECK(r.exact_zero_r1);
  CHECK(r.exact_zero_r2);
}

TEST_CASE("study validation") {
  RunConfig cfg = base_explicit();
  cfg.study.resolutions = {8, 16};
  cfg.study.dt0 = 0.01;
  CHECK_THROWS_AS(refinement_study(cfg), ConfigError); // too short
  cfg.study.resolutions = {8, 16, 12};
  CHECK_THROWS_AS(refinement_study(cfg), ConfigError); // not increasing
  cfg.study.resolutions = {8, 16, 32};
  cfg.study.dt0 = 0.0;
  CHECK_THROWS_AS(refinement_study(cfg), ConfigError); // missing dt0
}

TEST_CASE("selftest passes and reports per-suite lines") {
  std::stringstream out;
  const int failures = selftest(42, out);
  CHECK(failures == 0);
  const std::string text = out.str();
  CHECK(text.find("ok   entropy identity residual") != std::string::npos);
  CHECK(text.find("FAIL") == std::string::npos);
}
