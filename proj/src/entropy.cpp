#include "entfv/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace entfv {

namespace {

// Lower cutoff before taking logarithms; turns underflow into a clean
// domain error.
constexpr double kDomainFloor = 1e-300;

void check_domain(double z, const char* who) {
  if (!(z >= kDomainFloor))
    throw std::domain_error(std::string(who) + ": argument " +
                            std::to_string(z) + " outside (0, +inf)");
}

void check_gas(GasParameters gas) {
  if (!(gas.gamma > 1.0))
    throw std::domain_error("gamma must be > 1, got " +
                            std::to_string(gas.gamma));
}

} // namespace

ConvexFunction phi_rho() {
  return {[](double z) {
            check_domain(z, "phi_rho");
            return z * std::log(z);
          },
          [](double z) {
            check_domain(z, "phi_rho'");
            return std::log(z) + 1.0;
          },
          [](double z) {
            check_domain(z, "phi_rho''");
            return 1.0 / z;
          }};
}

ConvexFunction phi_e(GasParameters gas) {
  check_gas(gas);
  const double c = 1.0 / (gas.gamma - 1.0);
  return {[c](double z) {
            check_domain(z, "phi_e");
            return -c * std::log(z);
          },
          [c](double z) {
            check_domain(z, "phi_e'");
            return -c / z;
          },
          [c](double z) {
            check_domain(z, "phi_e''");
            return c / (z * z);
          }};
}

double eos_pressure(double rho, double e, GasParameters gas) {
  check_gas(gas);
  check_domain(rho, "eos_pressure(rho)");
  check_domain(e, "eos_pressure(e)");
  return (gas.gamma - 1.0) * rho * e;
}

double eta(double rho, double e, GasParameters gas) {
  check_gas(gas);
  check_domain(rho, "eta(rho)");
  check_domain(e, "eta(e)");
  const double c = 1.0 / (gas.gamma - 1.0);
  return rho * std::log(rho) + rho * (-c * std::log(e));
}

double entropy_identity_residual(double rho, double e, GasParameters gas) {
  check_gas(gas);
  check_domain(rho, "entropy_identity_residual(rho)");
  check_domain(e, "entropy_identity_residual(e)");
  // rho phi_rho'(rho) - phi_rho(rho) + phi_e'(e) p, in long double.
  const long double r = rho, ee = e, g = gas.gamma;
  const long double t1 = r * (logl(r) + 1.0L);
  const long double t2 = r * logl(r);
  const long double p = (g - 1.0L) * r * ee;
  const long double t3 = (-1.0L / ((g - 1.0L) * ee)) * p;
  return static_cast<double>(t1 - t2 + t3);
}

double solve_xkl(const ConvexFunction& phi, double x_k, double x_l) {
  if (x_k == x_l) return x_k;
  // Order the endpoints so the arithmetic is identical under K/L exchange.
  const double lo = std::min(x_k, x_l), hi = std::max(x_k, x_l);
  const double scale = std::max(std::fabs(lo), std::fabs(hi));
  // Below this width the curvature correction to the midpoint is under the
  // rounding of the evaluations themselves; the midpoint is the correctly
  // rounded intersection.
  if (hi - lo <= 1e-8 * scale) return 0.5 * (lo + hi);
  const double flo = phi.eval(lo), fhi = phi.eval(hi);
  const double dlo = phi.deriv(lo), dhi = phi.deriv(hi);
  const double den = dlo - dhi;
  if (!(std::fabs(den) > 0.0))
    throw std::logic_error(
        "solve_xkl: parallel tangents (phi not strictly convex)");
  const double x = lo + (fhi - flo - dhi * (hi - lo)) / den;
  // Interval escape beyond the stated slack plus the conditioning of the
  // solve signals a non-convex phi. The allowance is capped so macroscopic
  // escapes always throw.
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double cond = 64.0 * eps *
                      (std::fabs(flo) + std::fabs(fhi) +
                       std::fabs(dhi) * (hi - lo)) /
                      std::fabs(den);
  const double tol =
      std::max(1e-10 * scale, std::min(cond, 0.5 * (hi - lo)));
  if (!(x >= lo - tol && x <= hi + tol))
    throw std::logic_error(
        "solve_xkl: tangent intersection leaves |[x_k, x_l]| (phi not "
        "strictly convex?)");
  return std::clamp(x, lo, hi);
}

double delta_phi(const ConvexFunction& phi, double x_k, double x_l,
                 double x_sigma) {
  const double x_kl = solve_xkl(phi, x_k, x_l);
  return phi.eval(x_k) - phi.eval(x_sigma) +
         phi.deriv(x_k) * (x_kl - x_k) +
         0.5 * (phi.deriv(x_k) + phi.deriv(x_l)) * (x_sigma - x_kl);
}

std::pair<double, double> second_derivative_range(const ConvexFunction& phi,
                                                  double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  constexpr int kSamples = 9;
  double mn = std::min(phi.second(lo), phi.second(hi));
  double mx = std::max(phi.second(lo), phi.second(hi));
  for (int i = 1; i < kSamples; ++i) {
    const double z = lo + (hi - lo) * static_cast<double>(i) / kSamples;
    const double v = phi.second(z);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  return {mn, mx};
}

double deriv_abs_max(const ConvexFunction& phi, double lo, double hi) {
  return std::max(std::fabs(phi.deriv(lo)), std::fabs(phi.deriv(hi)));
}

} // namespace entfv
