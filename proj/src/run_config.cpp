#include "entfv/run_config.hpp"

#include "entfv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace entfv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v +
                      "' as a number");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v +
                      "' as an integer");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("config key '" + key + "': cannot parse '" + v +
                    "' as a boolean");
}

std::vector<std::size_t> parse_size_list(const std::string& key,
                                         const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const long x = parse_long(key, item);
    if (x <= 0)
      throw ConfigError("config key '" + key + "': entries must be positive");
    out.push_back(static_cast<std::size_t>(x));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

} // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
  RunConfig cfg;
  std::stringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key or value");

    if (key == "mesh.dim") cfg.dim = static_cast<int>(parse_long(key, val));
    else if (key == "mesh.nx") cfg.nx = static_cast<std::size_t>(parse_long(key, val));
    else if (key == "mesh.ny") cfg.ny = static_cast<std::size_t>(parse_long(key, val));
    else if (key == "mesh.lx") cfg.lx = parse_double(key, val);
    else if (key == "mesh.ly") cfg.ly = parse_double(key, val);
    else if (key == "init.kind") cfg.init_kind = val;
    else if (key == "init.rho0") cfg.init_rho0 = parse_double(key, val);
    else if (key == "init.e0") cfg.init_e0 = parse_double(key, val);
    else if (key == "init.amp_rho") cfg.init_amp_rho = parse_double(key, val);
    else if (key == "init.amp_e") cfg.init_amp_e = parse_double(key, val);
    else if (key == "init.center_x") cfg.init_center_x = parse_double(key, val);
    else if (key == "init.center_y") cfg.init_center_y = parse_double(key, val);
    else if (key == "init.width") cfg.init_width = parse_double(key, val);
    else if (key == "velocity.mode") cfg.velocity_mode = val;
    else if (key == "velocity.field") cfg.velocity_field = val;
    else if (key == "velocity.amplitude") cfg.velocity_amplitude = parse_double(key, val);
    else if (key == "scheme.kind") cfg.scheme_kind = val;
    else if (key == "scheme.strategy_rho") cfg.strategy_rho = val;
    else if (key == "scheme.strategy_e") cfg.strategy_e = val;
    else if (key == "scheme.gamma") cfg.gamma = parse_double(key, val);
    else if (key == "time.t_end") cfg.t_end = parse_double(key, val);
    else if (key == "time.dt") cfg.dt = parse_double(key, val);
    else if (key == "time.max_steps") cfg.max_steps = parse_long(key, val);
    else if (key == "time.cfl_safety") cfg.cfl_safety = parse_double(key, val);
    else if (key == "time.cfl_margin") cfg.cfl_margin = parse_double(key, val);
    else if (key == "stabilization.enabled") cfg.stab_enabled = parse_bool(key, val);
    else if (key == "stabilization.alpha") cfg.stab_alpha = parse_double(key, val);
    else if (key == "stabilization.q") cfg.stab_q = parse_double(key, val);
    else if (key == "solver.linear_tol") cfg.linear_tol = parse_double(key, val);
    else if (key == "solver.picard_tol") cfg.picard_tol = parse_double(key, val);
    else if (key == "solver.picard_max_iter") cfg.picard_max_iter = static_cast<int>(parse_long(key, val));
    else if (key == "diagnostics.holder_p") cfg.holder_p = parse_double(key, val);
    else if (key == "diagnostics.modes") cfg.modes = static_cast<int>(parse_long(key, val));
    else if (key == "diagnostics.bounds") cfg.bounds_enabled = parse_bool(key, val);
    else if (key == "output.dir") cfg.out_dir = val;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(key, val));
    else if (key == "study.resolutions") cfg.study.resolutions = parse_size_list(key, val);
    else if (key == "study.beta") cfg.study.beta = parse_double(key, val);
    else if (key == "study.dt0") cfg.study.dt0 = parse_double(key, val);
    else
      throw ConfigError("unknown config key '" + key + "' (line " +
                        std::to_string(lineno) + ")");
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

void RunConfig::validate() const {
  if (dim != 1 && dim != 2) throw ConfigError("mesh.dim must be 1 or 2");
  if (nx < 1 || (dim == 2 && ny < 1))
    throw ConfigError("mesh resolution must be >= 1");
  if (!(lx > 0.0) || (dim == 2 && !(ly > 0.0)))
    throw ConfigError("mesh lengths must be > 0");
  if (init_kind != "uniform" && init_kind != "gaussian-bump")
    throw ConfigError("init.kind must be uniform | gaussian-bump");
  if (init_kind == "uniform" && (!(init_rho0 > 0.0) || !(init_e0 > 0.0)))
    throw ConfigError("uniform initial data must be strictly positive");
  if (init_kind == "gaussian-bump" &&
      (!(init_amp_rho > 0.0) || !(init_amp_e > 0.0) || !(init_width > 0.0)))
    throw ConfigError("gaussian-bump parameters must be strictly positive");
  if (velocity_mode != "prescribed" && velocity_mode != "evolved_1d")
    throw ConfigError("velocity.mode must be prescribed | evolved_1d");
  if (velocity_mode == "evolved_1d" && dim != 1)
    throw ConfigError("velocity.mode evolved_1d requires a 1D mesh");
  if (velocity_field != "zero" && velocity_field != "sine" &&
      velocity_field != "sine2d")
    throw ConfigError("velocity.field must be zero | sine | sine2d");
  if (velocity_field == "sine2d" && dim != 2)
    throw ConfigError("velocity.field sine2d requires a 2D mesh");
  if (scheme_kind != "explicit" && scheme_kind != "implicit")
    throw ConfigError("scheme.kind must be explicit | implicit");
  if (scheme_kind == "implicit" && !(dt > 0.0))
    throw ConfigError("the implicit scheme requires a fixed time.dt > 0");
  if (!(t_end >= 0.0)) throw ConfigError("time.t_end must be >= 0");
  if (max_steps < 0) throw ConfigError("time.max_steps must be >= 0");
  if (modes < 1) throw ConfigError("diagnostics.modes must be >= 1");
  if (!(holder_p > 1.0)) throw ConfigError("diagnostics.holder_p must be > 1");
  scheme_config().validate();
}

void RunConfig::validate_study() const {
  validate();
  const auto& rs = study.resolutions;
  if (rs.size() < 3)
    throw ConfigError("study.resolutions needs at least 3 levels");
  for (std::size_t i = 1; i < rs.size(); ++i)
    if (rs[i] <= rs[i - 1])
      throw ConfigError("study.resolutions must be strictly increasing");
  if (!(study.dt0 > 0.0))
    throw ConfigError("study.dt0 (dt at the coarsest level) must be > 0");
  if (!(study.beta >= 0.0)) throw ConfigError("study.beta must be >= 0");
  if (dim != 1) throw ConfigError("refinement studies are 1D (mesh.dim = 1)");
}

Mesh RunConfig::make_mesh() const { return make_mesh_resolution(nx); }

Mesh RunConfig::make_mesh_resolution(std::size_t n) const {
  return dim == 1 ? Mesh::build_1d(n, lx) : Mesh::build_2d(n, ny, lx, ly);
}

SchemeConfig RunConfig::scheme_config() const {
  SchemeConfig cfg;
  cfg.gas = {gamma};
  cfg.strategy_rho = FaceStrategy::from_name(strategy_rho);
  cfg.strategy_e = FaceStrategy::from_name(strategy_e);
  cfg.cfl_safety = cfl_safety;
  cfg.cfl_margin = cfl_margin;
  cfg.stabilization = {stab_enabled, stab_alpha, stab_q};
  cfg.picard_tol = picard_tol;
  cfg.picard_max_iter = picard_max_iter;
  cfg.linear_tol = linear_tol;
  return cfg;
}

State RunConfig::initial_state(const Mesh& mesh) const {
  State s;
  s.rho.resize(mesh.n_cells());
  s.e.resize(mesh.n_cells());
  if (init_kind == "uniform") {
    std::fill(s.rho.begin(), s.rho.end(), init_rho0);
    std::fill(s.e.begin(), s.e.end(), init_e0);
  } else {
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
      const Vec2 c = mesh.cell(k).centroid;
      double r2 = (c[0] - init_center_x) * (c[0] - init_center_x);
      if (mesh.dim() == 2)
        r2 += (c[1] - init_center_y) * (c[1] - init_center_y);
      const double bump = std::exp(-r2 / (init_width * init_width));
      s.rho[k] = 1.0 + init_amp_rho * bump;
      s.e[k] = 1.0 + init_amp_e * bump;
    }
  }
  s.u = prescribed_velocity(mesh);
  update_pressure(s, {gamma});
  return s;
}

FaceField RunConfig::prescribed_velocity(const Mesh& mesh) const {
  FaceField u(mesh.n_faces(), 0.0);
  if (velocity_field == "zero") return u;
  for (std::size_t f : mesh.interior_faces()) {
    const Face& face = mesh.face(f);
    const Vec2 c = face.centroid;
    double value = 0.0;
    if (velocity_field == "sine") {
      // x-direction field; faces with a y normal carry nothing
      if (std::fabs(face.normal[0]) > 0.5)
        value =
            velocity_amplitude * std::sin(M_PI * c[0] / lx) * face.normal[0];
    } else { // sine2d
      const double shape = velocity_amplitude * std::sin(M_PI * c[0] / lx) *
                           std::sin(M_PI * c[1] / ly);
      value = shape * (face.normal[0] + face.normal[1]); // one of them is 0
    }
    u[f] = value;
  }
  return u;
}

} // namespace entfv
