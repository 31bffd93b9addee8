#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "entfv/errors.hpp"
#include "entfv/mesh.hpp"

#include <cmath>

using namespace entfv;

namespace {

// Per-cell closure defect max_K |sum_sigma |sigma| n_{K,sigma}| (componentwise).
double closure_defect(const Mesh& m) {
  double worst = 0.0;
  for (std::size_t k = 0; k < m.n_cells(); ++k) {
    Vec2 acc{0.0, 0.0};
    for (std::size_t s : m.cell_faces(k)) {
      const Face& f = m.face(s);
      const double sgn = m.orientation(s, k);
      acc[0] += f.measure * sgn * f.normal[0];
      acc[1] += f.measure * sgn * f.normal[1];
    }
    worst = std::max(worst, std::max(std::fabs(acc[0]), std::fabs(acc[1])));
  }
  return worst;
}

} // namespace

TEST_CASE("1d construction: counts and measures") {
  Mesh m = Mesh::build_1d(4, 1.0);
  CHECK(m.n_cells() == 4);
  std::size_t interior = 0, boundary = 0;
  for (const Face& f : m.faces()) (f.boundary ? boundary : interior)++;
  CHECK(interior == 3);
  CHECK(boundary == 2);
  for (const Cell& c : m.cells()) CHECK(c.measure == doctest::Approx(0.25));
  for (const Face& f : m.faces()) CHECK(f.measure == 1.0); // point-face convention
}

TEST_CASE("1d degenerate single cell") {
  Mesh m = Mesh::build_1d(1, 2.0);
  CHECK(m.n_cells() == 1);
  CHECK(m.interior_faces().empty());
  CHECK(m.n_faces() == 2);
  for (const Face& f : m.faces()) CHECK(f.boundary);
  CHECK(m.cell(0).measure == doctest::Approx(2.0));
}

TEST_CASE("1d partition of the domain") {
  Mesh m = Mesh::build_1d(8, 1.0);
  double total = 0.0;
  for (const Cell& c : m.cells()) total += c.measure;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("2d construction: counts and measures") {
  Mesh m = Mesh::build_2d(2, 2, 1.0, 1.0);
  CHECK(m.n_cells() == 4);
  std::size_t interior = 0, boundary = 0;
  for (const Face& f : m.faces()) (f.boundary ? boundary : interior)++;
  CHECK(interior == 4);
  CHECK(boundary == 8);
  for (const Cell& c : m.cells()) CHECK(c.measure == doctest::Approx(0.25));
}

TEST_CASE("2d degenerate single cell") {
  Mesh m = Mesh::build_2d(1, 1, 1.0, 1.0);
  CHECK(m.n_cells() == 1);
  CHECK(m.interior_faces().empty());
  CHECK(m.n_faces() == 4);
}

TEST_CASE("closure holds on all providers") {
  CHECK(closure_defect(Mesh::build_1d(5, 3.0)) <= 1e-12);
  CHECK(closure_defect(Mesh::build_2d(3, 2, 3.0, 2.0)) <= 1e-12);
  CHECK(closure_defect(Mesh::build_2d(4, 4, 1.0, 2.5)) <= 1e-12);
}

TEST_CASE("interior faces have two cells, boundary one") {
  Mesh m = Mesh::build_2d(3, 2, 3.0, 2.0);
  for (const Face& f : m.faces()) {
    if (f.boundary) {
      CHECK(f.cells[0] >= 0);
      CHECK(f.cells[1] == -1);
    } else {
      CHECK(f.cells[0] >= 0);
      CHECK(f.cells[1] >= 0);
      CHECK(f.cells[0] != f.cells[1]);
    }
  }
}

TEST_CASE("face count per cell bounded by 2 (1d) / 4 (2d)") {
  Mesh a = Mesh::build_1d(7, 1.0);
  CHECK(a.max_faces_per_cell() == 2);
  Mesh b = Mesh::build_2d(3, 5, 1.0, 1.0);
  CHECK(b.max_faces_per_cell() == 4);
}

TEST_CASE("h_max") {
  CHECK(Mesh::build_1d(4, 1.0).h_max() == doctest::Approx(0.25));
  // diagonal of a 0.5 x 0.5 cell
  CHECK(Mesh::build_2d(2, 2, 1.0, 1.0).h_max() ==
        doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  CHECK(Mesh::build_1d(1, 2.0).h_max() == doctest::Approx(2.0));
}

TEST_CASE("h_underline") {
  // 1d uniform, h = 0.25, two faces of measure 1 -> 0.125
  CHECK(Mesh::build_1d(4, 1.0).h_underline() == doctest::Approx(0.125));
  // 2d: |K| = 0.25, sum |sigma| = 4 * 0.5 = 2 -> 0.125
  CHECK(Mesh::build_2d(2, 2, 1.0, 1.0).h_underline() == doctest::Approx(0.125));
  // single cell of length 2: 2 / (1 + 1) = 1
  CHECK(Mesh::build_1d(1, 2.0).h_underline() == doctest::Approx(1.0));
}

TEST_CASE("regularity constant") {
  CHECK(Mesh::build_1d(16, 1.0).regularity_cm() == doctest::Approx(2.0));
  CHECK(Mesh::build_1d(1, 2.0).regularity_cm() == doctest::Approx(2.0));
  // (0.5 + 0.5) * (sqrt(2)/2) / 0.25 = 2 sqrt(2)
  CHECK(Mesh::build_2d(2, 2, 1.0, 1.0).regularity_cm() ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("h_underline <= h_max on every provider") {
  for (const Mesh& m : {Mesh::build_1d(3, 1.0), Mesh::build_1d(1, 0.5),
                        Mesh::build_2d(4, 3, 2.0, 1.0)}) {
    CHECK(m.h_underline() <= m.h_max() + 1e-15);
  }
}

TEST_CASE("invalid arguments are rejected") {
  CHECK_THROWS_AS(Mesh::build_1d(0, 1.0), ConfigError);
  CHECK_THROWS_AS(Mesh::build_1d(4, 0.0), ConfigError);
  CHECK_THROWS_AS(Mesh::build_1d(4, -1.0), ConfigError);
  CHECK_THROWS_AS(Mesh::build_2d(0, 1, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Mesh::build_2d(1, 1, 1.0, -2.0), ConfigError);
}
