#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace entfv {

using Vec2 = std::array<double, 2>;

struct Cell {
  double measure = 0.0;   // |K|
  Vec2 centroid{0.0, 0.0};
  double diameter = 0.0;  // h_K (cell length in 1D, rectangle diagonal in 2D)
};

/// A (d-1)-face. Interior faces store both adjacent cells, ordered; the
/// stored normal points from cells[0] toward cells[1]. Boundary faces store
/// the single adjacent cell in cells[0] with the outward normal.
struct Face {
  double measure = 0.0;          // |sigma|; 1 by convention in 1D (point faces)
  Vec2 centroid{0.0, 0.0};
  Vec2 normal{0.0, 0.0};         // unit normal of cells[0]
  std::array<long, 2> cells{-1, -1};
  bool boundary = false;
};

/// Immutable cell/face geometry and connectivity for the mesh providers
/// (uniform 1D intervals and 2D Cartesian grids) behind a general polygonal
/// interface. Refinement builds a new mesh.
class Mesh {
public:
  static Mesh build_1d(std::size_t n_cells, double length);
  static Mesh build_2d(std::size_t nx, std::size_t ny, double lx, double ly);

  int dim() const noexcept { return dim_; }
  std::size_t n_cells() const noexcept { return cells_.size(); }
  std::size_t n_faces() const noexcept { return faces_.size(); }

  const Cell& cell(std::size_t k) const { return cells_[k]; }
  const Face& face(std::size_t s) const { return faces_[s]; }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }

  /// E(K): face indices of cell k, boundary faces included.
  const std::vector<std::size_t>& cell_faces(std::size_t k) const {
    return cell_faces_[k];
  }
  const std::vector<std::size_t>& interior_faces() const noexcept {
    return interior_faces_;
  }

  /// Sign of the face normal seen from cell k: +1 if k == face.cells[0].
  double orientation(std::size_t face_id, std::size_t k) const {
    return faces_[face_id].cells[0] == static_cast<long>(k) ? 1.0 : -1.0;
  }
  /// Cell on the other side of an interior face.
  std::size_t neighbor(std::size_t face_id, std::size_t k) const {
    const Face& f = faces_[face_id];
    return static_cast<std::size_t>(
        f.cells[0] == static_cast<long>(k) ? f.cells[1] : f.cells[0]);
  }

  double domain_measure() const noexcept { return domain_measure_; }
  Vec2 domain_lengths() const noexcept { return lengths_; }
  std::size_t max_faces_per_cell() const;

  /// max_K diam(K)
  double h_max() const;
  /// min_K |K| / sum_{sigma in E(K)} |sigma|
  double h_underline() const;
  /// max over cells and face pairs of (|sigma|+|sigma'|) h_K / |K|
  double regularity_cm() const;

private:
  int dim_ = 0;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::vector<std::vector<std::size_t>> cell_faces_;
  std::vector<std::size_t> interior_faces_;
  double domain_measure_ = 0.0;
  Vec2 lengths_{0.0, 0.0};
};

} // namespace entfv
