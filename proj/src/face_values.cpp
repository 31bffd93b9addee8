#include "entfv/face_values.hpp"

#include "entfv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace entfv {

FaceStrategy FaceStrategy::from_name(const std::string& name) {
  if (name == "upwind") return upwind();
  if (name == "centered") return centered();
  if (name == "limited") return limited();
  throw ConfigError("unknown face strategy '" + name +
                    "' (expected upwind | centered | limited)");
}

const char* FaceStrategy::name() const {
  switch (kind) {
    case StrategyKind::upwind: return "upwind";
    case StrategyKind::centered: return "centered";
    case StrategyKind::limited: return "limited";
  }
  return "?";
}

Interval admissible_interval(const ConvexFunction& phi, double x_k, double x_l,
                             double u_sign) {
  const double x_kl = solve_xkl(phi, x_k, x_l);
  const double anchor = u_sign >= 0.0 ? x_k : x_l;
  return {std::min(anchor, x_kl), std::max(anchor, x_kl)};
}

FaceValueRecord face_value(const FaceStrategy& strategy,
                           const ConvexFunction& phi, double x_k, double x_l,
                           double u_k_sigma) {
  FaceValueRecord rec;
  rec.upwind_side = u_k_sigma >= 0.0 ? 0 : 1;
  const double upwind_value = rec.upwind_side == 0 ? x_k : x_l;

  switch (strategy.kind) {
    case StrategyKind::upwind: {
      const Interval iv = admissible_interval(phi, x_k, x_l, u_k_sigma);
      rec.value = upwind_value;
      rec.lo = iv.lo;
      rec.hi = iv.hi;
      rec.constrained = true;
      break;
    }
    case StrategyKind::centered: {
      rec.value = 0.5 * (x_k + x_l);
      rec.lo = rec.hi = std::numeric_limits<double>::quiet_NaN();
      rec.constrained = false;
      break;
    }
    case StrategyKind::limited: {
      const Interval iv = admissible_interval(phi, x_k, x_l, u_k_sigma);
      const double cand = strategy.candidate ? strategy.candidate(x_k, x_l)
                                             : 0.5 * (x_k + x_l);
      rec.value = std::clamp(cand, iv.lo, iv.hi);
      rec.lo = iv.lo;
      rec.hi = iv.hi;
      rec.constrained = true;
      break;
    }
  }
  return rec;
}

} // namespace entfv
