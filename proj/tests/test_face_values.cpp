#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "entfv/face_values.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace entfv;

namespace {

ConvexFunction square() {
  return {[](double z) { return z * z; }, [](double z) { return 2.0 * z; },
          [](double) { return 2.0; }};
}

} // namespace

TEST_CASE("admissible interval endpoints") {
  // z^2 has x_kl = midpoint, so (1, 3, u >= 0) -> [1, 2]
  Interval i = admissible_interval(square(), 1.0, 3.0, 1.0);
  CHECK(i.lo == doctest::Approx(1.0));
  CHECK(i.hi == doctest::Approx(2.0));

  Interval j = admissible_interval(square(), 4.0, 4.0, -1.0);
  CHECK(j.lo == 4.0);
  CHECK(j.hi == 4.0);

  // phi_rho, downwind side: x_kl = e - 1, interval [e - 1, e]
  const double E = std::exp(1.0);
  Interval k = admissible_interval(phi_rho(), 1.0, E, -1.0);
  CHECK(k.lo == doctest::Approx(E - 1.0).epsilon(1e-13));
  CHECK(k.hi == doctest::Approx(E).epsilon(1e-13));
}

TEST_CASE("upwind face values") {
  FaceStrategy s = FaceStrategy::upwind();
  FaceValueRecord a = face_value(s, phi_rho(), 1.0, 2.0, 1.0);
  CHECK(a.value == 1.0);
  CHECK(a.upwind_side == 0);
  FaceValueRecord b = face_value(s, phi_rho(), 1.0, 2.0, -1.0);
  CHECK(b.value == 2.0);
  CHECK(b.upwind_side == 1);
  // zero velocity counts as "flow from K"
  CHECK(face_value(s, phi_rho(), 3.0, 7.0, 0.0).value == 3.0);
}

TEST_CASE("limited face values clamp into the admissible interval") {
  FaceStrategy s = FaceStrategy::limited();
  // candidate 2 already inside [1, 2]
  FaceValueRecord a = face_value(s, square(), 1.0, 3.0, 1.0);
  CHECK(a.value == doctest::Approx(2.0).epsilon(1e-14));
  // candidate (1 + e)/2 = 1.859... clamped down to x_kl = e - 1
  const double E = std::exp(1.0);
  FaceValueRecord b = face_value(s, phi_rho(), 1.0, E, 1.0);
  CHECK(b.value == doctest::Approx(E - 1.0).epsilon(1e-13));
}

TEST_CASE("centered records carry no interval") {
  FaceValueRecord r = face_value(FaceStrategy::centered(), phi_rho(), 1.0,
                                 2.0, 1.0);
  CHECK(r.value == doctest::Approx(1.5));
  CHECK_FALSE(r.constrained);
}

TEST_CASE("hypothesis membership for upwind and limited strategies") {
  std::mt19937_64 rng(23);
  ConvexFunction fns[] = {phi_rho(), phi_e({1.4}), square()};
  for (const ConvexFunction& p : fns) {
    for (const FaceStrategy& s :
         {FaceStrategy::upwind(), FaceStrategy::limited()}) {
      for (int i = 0; i < 1000; ++i) {
        const double a = oracles::log_uniform(rng, 1e-2, 1e2);
        const double b = oracles::log_uniform(rng, 1e-2, 1e2);
        const double u = oracles::uniform(rng, -2.0, 2.0);
        FaceValueRecord r = face_value(s, p, a, b, u);
        CHECK(r.constrained);
        CHECK(r.value >= r.lo - 1e-14 * std::max(1.0, std::fabs(r.lo)));
        CHECK(r.value <= r.hi + 1e-14 * std::max(1.0, std::fabs(r.hi)));
      }
    }
  }
}

TEST_CASE("centered equals limited for z^2") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 500; ++i) {
    const double a = oracles::log_uniform(rng, 1e-2, 1e2);
    const double b = oracles::log_uniform(rng, 1e-2, 1e2);
    const double u = oracles::uniform(rng, -2.0, 2.0);
    const double c = face_value(FaceStrategy::centered(), square(), a, b, u).value;
    const double l = face_value(FaceStrategy::limited(), square(), a, b, u).value;
    CHECK(std::fabs(c - l) <= 1e-14 * std::max(1.0, std::fabs(c)));
  }
}

TEST_CASE("mass flux") {
  CHECK(mass_flux(1.0, 2.0, 3.0) == 6.0);
  CHECK(mass_flux(0.5, 1.0, -2.0) == -1.0);
  CHECK(mass_flux(0.7, 3.0, 0.0) == 0.0);
}

TEST_CASE("mass flux antisymmetry is exact") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 200; ++i) {
    const double m = oracles::log_uniform(rng, 0.1, 10.0);
    const double r = oracles::log_uniform(rng, 0.1, 10.0);
    const double u = oracles::uniform(rng, -3.0, 3.0);
    CHECK(mass_flux(m, r, u) == -mass_flux(m, r, -u));
  }
}

TEST_CASE("strategy names round-trip") {
  CHECK(FaceStrategy::from_name("upwind").kind == StrategyKind::upwind);
  CHECK(FaceStrategy::from_name("centered").kind == StrategyKind::centered);
  CHECK(FaceStrategy::from_name("limited").kind == StrategyKind::limited);
  CHECK_THROWS(FaceStrategy::from_name("fancy"));
}
