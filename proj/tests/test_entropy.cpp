#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "entfv/entropy.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace entfv;

namespace {

ConvexFunction square() {
  return {[](double z) { return z * z; }, [](double z) { return 2.0 * z; },
          [](double) { return 2.0; }};
}

bool in_hull(double x, double a, double b, double tol) {
  return x >= std::min(a, b) - tol && x <= std::max(a, b) + tol;
}

} // namespace

TEST_CASE("phi_rho values") {
  ConvexFunction p = phi_rho();
  CHECK(p.eval(1.0) == doctest::Approx(0.0));
  CHECK(p.deriv(1.0) == doctest::Approx(1.0));
  CHECK(p.second(2.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(p.eval(0.0), std::domain_error);
  CHECK_THROWS_AS(p.deriv(-1.0), std::domain_error);
}

TEST_CASE("phi_e values") {
  ConvexFunction p2 = phi_e({2.0});
  CHECK(p2.eval(1.0) == doctest::Approx(0.0));
  ConvexFunction p14 = phi_e({1.4});
  CHECK(p14.deriv(1.0) == doctest::Approx(-2.5));
  CHECK(p14.second(1.0) == doctest::Approx(2.5));
  CHECK_THROWS_AS(p14.eval(0.0), std::domain_error);
}

TEST_CASE("derivatives match finite differences") {
  std::mt19937_64 rng(7);
  ConvexFunction fns[] = {phi_rho(), phi_e({1.4}), phi_e({3.0})};
  for (const ConvexFunction& p : fns) {
    for (int i = 0; i < 200; ++i) {
      const double z = oracles::log_uniform(rng, 1e-2, 1e2);
      const double h = 1e-5 * z;
      const double fd = (p.eval(z + h) - p.eval(z - h)) / (2.0 * h);
      CHECK(p.deriv(z) ==
            doctest::Approx(fd).epsilon(1e-6).scale(std::fabs(fd) + 1.0));
      CHECK(p.second(z) > 0.0);
    }
  }
}

TEST_CASE("equation of state") {
  CHECK(eos_pressure(2.0, 3.0, {1.4}) == doctest::Approx(2.4));
  CHECK(eos_pressure(1.0, 1.0, {2.0}) == doctest::Approx(1.0));
  CHECK(eos_pressure(0.5, 4.0, {1.4}) == doctest::Approx(0.8));
  CHECK_THROWS_AS(eos_pressure(0.0, 1.0, {1.4}), std::domain_error);
  CHECK_THROWS_AS(eos_pressure(1.0, -2.0, {1.4}), std::domain_error);
}

TEST_CASE("entropy density") {
  CHECK(eta(1.0, 1.0, {1.7}) == doctest::Approx(0.0));
  const double E = std::exp(1.0);
  CHECK(eta(E, 1.0, {2.0}) == doctest::Approx(E));
  CHECK(eta(1.0, E, {2.0}) == doctest::Approx(-1.0));
}

TEST_CASE("entropy identity residual vanishes") {
  CHECK(std::fabs(entropy_identity_residual(1.0, 1.0, {1.4})) <= 1e-14);
  CHECK(std::fabs(entropy_identity_residual(2.0, 3.0, {1.4})) <= 1e-14);
  CHECK(std::fabs(entropy_identity_residual(0.1, 10.0, {3.0})) <= 1e-13);
}

TEST_CASE("entropy identity residual: 1e4 random samples") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 10000; ++i) {
    const double rho = oracles::log_uniform(rng, 1e-3, 1e3);
    const double e = oracles::log_uniform(rng, 1e-3, 1e3);
    const double gamma = 1.0 + oracles::uniform(rng, 1e-6, 4.0);
    CHECK(std::fabs(entropy_identity_residual(rho, e, {gamma})) <= 1e-13);
  }
}

TEST_CASE("solve_xkl closed forms") {
  // z^2: midpoint
  CHECK(solve_xkl(square(), 1.0, 3.0) == doctest::Approx(2.0).epsilon(1e-14));
  // equal arguments short-circuit
  CHECK(solve_xkl(phi_rho(), 5.0, 5.0) == 5.0);
  // z log z: logarithmic mean, (1, e) -> e - 1
  const double E = std::exp(1.0);
  CHECK(solve_xkl(phi_rho(), 1.0, E) ==
        doctest::Approx(E - 1.0).epsilon(1e-13));
  // -log(z)/(gamma-1): x_k x_l log(x_k/x_l)/(x_k - x_l), (1,2) -> 2 log 2
  CHECK(solve_xkl(phi_e({1.4}), 1.0, 2.0) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("solve_xkl agrees with the bisection oracle") {
  std::mt19937_64 rng(11);
  ConvexFunction fns[] = {phi_rho(), phi_e({1.4}), square()};
  for (const ConvexFunction& p : fns) {
    for (int i = 0; i < 500; ++i) {
      const auto [a, b] = oracles::separated_pair(rng, 1e-2, 1e2);
      const double x = solve_xkl(p, a, b);
      const double ref = oracles::bisect_xkl(p, a, b);
      CHECK(std::fabs(x - ref) <= 1e-10 * std::max(1.0, std::fabs(ref)));
    }
  }
}

TEST_CASE("solve_xkl: nearly equal arguments return an interior point") {
  // Adjacent states that agree to rounding level must not trip the
  // consistency check; the returned point stays in the (tiny) hull.
  for (double base : {1.0, 0.37, 42.0}) {
    for (double gap : {1e-16, 1e-12, 1e-9, 1e-7}) {
      const double a = base, b = base * (1.0 + gap);
      const double x = solve_xkl(phi_rho(), a, b);
      CHECK(x >= std::min(a, b));
      CHECK(x <= std::max(a, b));
    }
  }
}

TEST_CASE("solve_xkl membership and symmetry") {
  std::mt19937_64 rng(13);
  ConvexFunction fns[] = {phi_rho(), phi_e({2.2}), square()};
  for (const ConvexFunction& p : fns) {
    for (int i = 0; i < 2000; ++i) {
      const double a = oracles::log_uniform(rng, 1e-2, 1e2);
      const double b = oracles::log_uniform(rng, 1e-2, 1e2);
      const double x = solve_xkl(p, a, b);
      CHECK(in_hull(x, a, b, 0.0)); // clamped, so exact membership
      const double y = solve_xkl(p, b, a);
      CHECK(std::fabs(x - y) <= 1e-14 * std::max(1.0, std::fabs(x)));
    }
  }
}

TEST_CASE("solve_xkl rejects a non-convex phi") {
  // z^3 - 3z^2 has parallel tangents at 0.5 and 1.5, so the intersection
  // escapes to infinity, which the membership check must catch.
  ConvexFunction bad{[](double z) { return z * z * z - 3.0 * z * z; },
                     [](double z) { return 3.0 * z * z - 6.0 * z; },
                     [](double z) { return 6.0 * z - 6.0; }};
  CHECK_THROWS_AS(solve_xkl(bad, 0.5, 1.5), std::logic_error);
}

TEST_CASE("delta_phi: frozen hand value") {
  // x_k = 1, x_l = 2, x_s = 1, phi = z log z. With x_kl = 1/log 2 the
  // increment collapses to -(1 - log 2)/2; the extended-precision oracle
  // confirms the same digits.
  const double expected = -(1.0 - std::log(2.0)) / 2.0; // -0.15342640972002733
  CHECK(delta_phi(phi_rho(), 1.0, 2.0, 1.0) ==
        doctest::Approx(expected).epsilon(1e-13));
  const double hp =
      static_cast<double>(oracles::delta_phi_rho_hp(1.0L, 2.0L, 1.0L));
  CHECK(delta_phi(phi_rho(), 1.0, 2.0, 1.0) ==
        doctest::Approx(hp).epsilon(1e-13));
  CHECK(hp == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("delta_phi vanishes when all arguments coincide") {
  CHECK(delta_phi(phi_rho(), 3.0, 3.0, 3.0) == 0.0);
  CHECK(delta_phi(phi_e({1.4}), 0.7, 0.7, 0.7) == 0.0);
}

TEST_CASE("delta_phi is symmetric in K and L") {
  std::mt19937_64 rng(17);
  ConvexFunction fns[] = {phi_rho(), phi_e({1.4}), square()};
  for (const ConvexFunction& p : fns) {
    for (int i = 0; i < 500; ++i) {
      const double a = oracles::log_uniform(rng, 0.1, 10.0);
      const double b = oracles::log_uniform(rng, 0.1, 10.0);
      const double s = std::min(a, b) + oracles::u01(rng) * std::fabs(b - a);
      CHECK(std::fabs(delta_phi(p, a, b, s) - delta_phi(p, b, a, s)) <= 1e-12);
    }
  }
}

TEST_CASE("upwind annihilation of the face Taylor rest") {
  // phi(x_k) - phi(x_s) + phi'(x_k)(x_s - x_k) = 0 when x_s = x_k.
  ConvexFunction p = phi_rho();
  for (double z : {0.3, 1.0, 4.5}) {
    const double rest = p.eval(z) - p.eval(z) + p.deriv(z) * (z - z);
    CHECK(rest == 0.0);
  }
}
