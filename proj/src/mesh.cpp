#include "entfv/mesh.hpp"

#include "entfv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace entfv {

Mesh Mesh::build_1d(std::size_t n_cells, double length) {
  if (n_cells < 1) throw ConfigError("build_1d: n_cells must be >= 1");
  if (!(length > 0.0)) throw ConfigError("build_1d: length must be > 0");

  Mesh m;
  m.dim_ = 1;
  m.lengths_ = {length, 0.0};
  m.domain_measure_ = length;

  const double h = length / static_cast<double>(n_cells);
  m.cells_.resize(n_cells);
  for (std::size_t k = 0; k < n_cells; ++k) {
    m.cells_[k].measure = h;
    m.cells_[k].centroid = {(static_cast<double>(k) + 0.5) * h, 0.0};
    m.cells_[k].diameter = h;
  }

  // Faces at the n_cells + 1 interval endpoints; point faces carry measure 1,
  // so fluxes reduce to pointwise values.
  m.faces_.resize(n_cells + 1);
  m.cell_faces_.assign(n_cells, {});
  for (std::size_t s = 0; s <= n_cells; ++s) {
    Face& f = m.faces_[s];
    f.measure = 1.0;
    f.centroid = {static_cast<double>(s) * h, 0.0};
    f.normal = {1.0, 0.0};
    if (s == 0) {
      f.boundary = true;
      f.cells = {0, -1};
      f.normal = {-1.0, 0.0}; // outward
    } else if (s == n_cells) {
      f.boundary = true;
      f.cells = {static_cast<long>(n_cells - 1), -1};
    } else {
      f.cells = {static_cast<long>(s - 1), static_cast<long>(s)};
      m.interior_faces_.push_back(s);
    }
    m.cell_faces_[static_cast<std::size_t>(f.cells[0])].push_back(s);
    if (f.cells[1] >= 0)
      m.cell_faces_[static_cast<std::size_t>(f.cells[1])].push_back(s);
  }
  return m;
}

Mesh Mesh::build_2d(std::size_t nx, std::size_t ny, double lx, double ly) {
  if (nx < 1 || ny < 1) throw ConfigError("build_2d: nx, ny must be >= 1");
  if (!(lx > 0.0) || !(ly > 0.0))
    throw ConfigError("build_2d: lx, ly must be > 0");

  Mesh m;
  m.dim_ = 2;
  m.lengths_ = {lx, ly};
  m.domain_measure_ = lx * ly;

  const double dx = lx / static_cast<double>(nx);
  const double dy = ly / static_cast<double>(ny);
  const double diam = std::hypot(dx, dy);

  auto cid = [nx](std::size_t i, std::size_t j) {
    return static_cast<long>(j * nx + i);
  };

  m.cells_.resize(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      Cell& c = m.cells_[static_cast<std::size_t>(cid(i, j))];
      c.measure = dx * dy;
      c.centroid = {(static_cast<double>(i) + 0.5) * dx,
                    (static_cast<double>(j) + 0.5) * dy};
      c.diameter = diam;
    }

  m.cell_faces_.assign(nx * ny, {});
  auto push_face = [&m](Face f) {
    const std::size_t s = m.faces_.size();
    m.faces_.push_back(f);
    if (!f.boundary) m.interior_faces_.push_back(s);
    m.cell_faces_[static_cast<std::size_t>(f.cells[0])].push_back(s);
    if (f.cells[1] >= 0)
      m.cell_faces_[static_cast<std::size_t>(f.cells[1])].push_back(s);
  };

  // Vertical faces (normal along x), measure dy.
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i <= nx; ++i) {
      Face f;
      f.measure = dy;
      f.centroid = {static_cast<double>(i) * dx,
                    (static_cast<double>(j) + 0.5) * dy};
      f.normal = {1.0, 0.0};
      if (i == 0) {
        f.boundary = true;
        f.cells = {cid(0, j), -1};
        f.normal = {-1.0, 0.0};
      } else if (i == nx) {
        f.boundary = true;
        f.cells = {cid(nx - 1, j), -1};
      } else {
        f.cells = {cid(i - 1, j), cid(i, j)};
      }
      push_face(f);
    }

  // Horizontal faces (normal along y), measure dx.
  for (std::size_t j = 0; j <= ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      Face f;
      f.measure = dx;
      f.centroid = {(static_cast<double>(i) + 0.5) * dx,
                    static_cast<double>(j) * dy};
      f.normal = {0.0, 1.0};
      if (j == 0) {
        f.boundary = true;
        f.cells = {cid(i, 0), -1};
        f.normal = {0.0, -1.0};
      } else if (j == ny) {
        f.boundary = true;
        f.cells = {cid(i, ny - 1), -1};
      } else {
        f.cells = {cid(i, j - 1), cid(i, j)};
      }
      push_face(f);
    }

  return m;
}

std::size_t Mesh::max_faces_per_cell() const {
  std::size_t n = 0;
  for (const auto& fs : cell_faces_) n = std::max(n, fs.size());
  return n;
}

double Mesh::h_max() const {
  double h = 0.0;
  for (const Cell& c : cells_) h = std::max(h, c.diameter);
  return h;
}

double Mesh::h_underline() const {
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    double perim = 0.0;
    for (std::size_t s : cell_faces_[k]) perim += faces_[s].measure;
    h = std::min(h, cells_[k].measure / perim);
  }
  return h;
}

double Mesh::regularity_cm() const {
  double cm = 0.0;
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    double largest = 0.0;
    for (std::size_t s : cell_faces_[k])
      largest = std::max(largest, faces_[s].measure);
    // Pairs (sigma, sigma') range over E(K)^2, sigma = sigma' included, so
    // the max pair sum is 2 * largest.
    cm = std::max(cm, 2.0 * largest * cells_[k].diameter / cells_[k].measure);
  }
  return cm;
}

} // namespace entfv
