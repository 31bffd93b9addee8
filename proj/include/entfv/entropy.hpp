#pragma once

#include <functional>
#include <utility>

namespace entfv {

struct GasParameters {
  double gamma = 1.4; // > 1
};

/// A strictly convex scalar function on (0, +inf), exposed through exactly
/// value / first / second derivative. Scheme and diagnostics code is generic
/// in this interface and never special-cases a particular entropy function.
struct ConvexFunction {
  std::function<double(double)> eval;
  std::function<double(double)> deriv;
  std::function<double(double)> second;
};

/// phi_rho(z) = z log z
ConvexFunction phi_rho();

/// phi_e(z) = -log(z) / (gamma - 1)
ConvexFunction phi_e(GasParameters gas);

/// p = (gamma - 1) rho e
double eos_pressure(double rho, double e, GasParameters gas);

/// eta(rho, e) = phi_rho(rho) + rho phi_e(e)
double eta(double rho, double e, GasParameters gas);

/// rho phi_rho'(rho) - phi_rho(rho) + phi_e'(e) p, analytically zero.
/// Accumulated in extended precision.
double entropy_identity_residual(double rho, double e, GasParameters gas);

/// The unique intersection point of the tangents of phi at x_k and x_l,
/// which lies in |[x_k, x_l]|. Closed-form linear solve; the result is
/// clamped to the interval after an internal-consistency check (fails with
/// std::logic_error when the solution leaves |[x_k, x_l]| by more than 1e-10
/// relative, i.e. phi is not strictly convex).
double solve_xkl(const ConvexFunction& phi, double x_k, double x_l);

/// Face increment used by the conservative remainders:
///   phi(x_k) - phi(x_s) + phi'(x_k)(x_kl - x_k)
///                       + (phi'(x_k) + phi'(x_l))/2 * (x_s - x_kl).
/// Symmetric in (x_k, x_l) by the tangent-intersection identity.
double delta_phi(const ConvexFunction& phi, double x_k, double x_l,
                 double x_sigma);

/// {min, max} of phi'' over [lo, hi], sampled at the endpoints and a fixed
/// interior grid (exact for the monotone second derivatives used here).
std::pair<double, double> second_derivative_range(const ConvexFunction& phi,
                                                  double lo, double hi);

/// max(|phi'(lo)|, |phi'(hi)|); for convex phi this is the sup of |phi'|
/// over [lo, hi].
double deriv_abs_max(const ConvexFunction& phi, double lo, double hi);

} // namespace entfv
