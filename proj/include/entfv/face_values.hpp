#pragma once

#include "entfv/entropy.hpp"

#include <functional>
#include <string>

namespace entfv {

enum class StrategyKind { upwind, centered, limited };

/// Face-value strategy for a convected scalar. The limited strategy clamps a
/// candidate reconstruction (default: the centered value) into the interval
/// between the upwind value and the tangent-intersection point, which keeps
/// the face-level entropy dissipation nonnegative.
struct FaceStrategy {
  StrategyKind kind = StrategyKind::upwind;
  // Candidate for the limited strategy; (x_k, x_l) -> value.
  std::function<double(double, double)> candidate;

  static FaceStrategy upwind() { return {StrategyKind::upwind, {}}; }
  static FaceStrategy centered() { return {StrategyKind::centered, {}}; }
  static FaceStrategy limited() { return {StrategyKind::limited, {}}; }
  /// "upwind" | "centered" | "limited"
  static FaceStrategy from_name(const std::string& name);
  const char* name() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// One face value together with the admissible interval it was checked
/// against. `constrained` is false for the centered strategy, whose record
/// carries no interval guarantee.
struct FaceValueRecord {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int upwind_side = 0; // 0 = K side, 1 = L side
  bool constrained = false;
};

/// |[x_k, x_kl]| when the flow leaves K (u >= 0), |[x_l, x_kl]| otherwise.
Interval admissible_interval(const ConvexFunction& phi, double x_k, double x_l,
                             double u_sign);

/// Face value for one interior face; u_k_sigma is the normal velocity seen
/// from K. Boundary faces never reach this call (their fluxes vanish).
FaceValueRecord face_value(const FaceStrategy& strategy,
                           const ConvexFunction& phi, double x_k, double x_l,
                           double u_k_sigma);

/// F_{K,sigma} = |sigma| rho_sigma u_{K,sigma}
inline double mass_flux(double face_measure, double rho_sigma,
                        double u_k_sigma) {
  return face_measure * rho_sigma * u_k_sigma;
}

} // namespace entfv
