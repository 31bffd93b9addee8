#include "entfv/harness.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>

namespace {

void apply_overrides(entfv::RunConfig& cfg, const std::string& out,
                     std::uint64_t seed, bool seed_set, int modes) {
  if (!out.empty()) cfg.out_dir = out;
  if (seed_set) cfg.seed = seed;
  if (modes > 0) cfg.modes = modes;
}

void print_summary(const entfv::RunSummary& s) {
  std::cout << "steps:                  " << s.steps << "\n"
            << "final time:             " << s.final_time << "\n"
            << "mass drift:             " << s.mass_final - s.mass_initial
            << "\n"
            << "entropy (initial):      " << s.initial_entropy << "\n"
            << "entropy (final):        " << s.final_entropy << "\n"
            << "max entropy residual:   " << s.max_entropy_residual << "\n"
            << "min rho / min e:        " << s.min_rho << " / " << s.min_e
            << "\n";
  for (const entfv::BoundEntry& b : s.bounds)
    std::cout << (b.satisfied ? "  bound ok   " : "  bound FAIL ") << b.name
              << "  lhs " << b.lhs << "  rhs " << b.rhs << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-volume laboratory for entropy inequalities of "
               "internal-energy Euler schemes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int modes = 0;

  auto add_common = [&](CLI::App* cmd, bool with_config) {
    if (with_config)
      cmd->add_option("config", config_path, "path to a key=value config file")
          ->required();
    cmd->add_option("--out", out_dir, "output directory override");
    cmd->add_option("--seed", seed, "random seed override")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--modes", modes,
                    "mode count for the weak-norm surrogate");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "execute one configured run");
  add_common(cmd_run, true);
  CLI::App* cmd_study =
      app.add_subcommand("study", "run the mesh-refinement ladder");
  add_common(cmd_study, true);
  CLI::App* cmd_self =
      app.add_subcommand("selftest", "run the built-in property suites");
  add_common(cmd_self, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(cmd_self)) {
      const int failures = entfv::selftest(seed_set ? seed : 42, std::cout);
      if (failures > 0) {
        std::cout << failures << " suite(s) failed\n";
        return 1;
      }
      std::cout << "all property suites passed\n";
      return 0;
    }

    entfv::RunConfig cfg = entfv::RunConfig::parse_file(config_path);
    apply_overrides(cfg, out_dir, seed, seed_set, modes);

    if (app.got_subcommand(cmd_run)) {
      const entfv::RunSummary s = entfv::run(cfg);
      print_summary(s);
      return s.bounds_ok ? 0 : 1;
    }

    const entfv::StudyResult r = entfv::refinement_study(cfg);
    std::cout << "levels: " << r.levels.size() << "\n";
    for (const entfv::StudyLevel& l : r.levels)
      std::cout << "  n = " << l.resolution << "  h = " << l.h << "  dt = "
                << l.dt << "  |R_eta2|_L1 = " << l.l1_eta_r2
                << "  weak(R_eta1) = " << l.weak_eta_r1 << "\n";
    if (r.exact_zero_r2)
      std::cout << "order(R_eta2): exact-zero\n";
    else
      std::cout << "order(R_eta2): " << r.order_eta_r2 << "\n";
    if (r.exact_zero_r1)
      std::cout << "order(R_eta1): exact-zero\n";
    else
      std::cout << "order(R_eta1): " << r.order_eta_r1 << "\n";
    std::cout << "M ratio: " << r.m_ratio << "  BV ratio: " << r.bv_ratio
              << "\n";
    return r.all_bounds_ok ? 0 : 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
