#ifndef CHUBANOV_CONFIG_HPP
#define CHUBANOV_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <optional>

#include "chubanov/algebra.hpp"

namespace chubanov {

/// Which test ends the Basic Procedure loop besides interiority and the threshold.
enum class BpStop {
  z_zero,       ///< stop when P y = 0
  y_minus_z,    ///< stop when y - P y lies in K
};

inline constexpr double kPhiTwo = 1.5 - 1.4142135623730950488;  // phi(2) = 3/2 - sqrt(2)

struct SolverConfig {
  double eps = 1e-6;
  std::optional<long> max_bp_iters;       ///< default 4 l^3 r_max^2
  std::optional<long> max_rescale_iters;  ///< default ceil(r / phi(2) * ln(1/eps)) + 8
  BpStop bp_stop = BpStop::z_zero;
  double tol_zero = 1e-12;
  double tol_int = kTolInterior;
  std::uint64_t seed = 0;

  long bp_budget(const ConeSpec& spec) const {
    if (max_bp_iters) return *max_bp_iters;
    const long l = static_cast<long>(spec.num_blocks());
    const long rmax = spec.max_rank();
    return 4 * l * l * l * rmax * rmax;
  }

  /// ceil(r / phi(2) * ln(1/eps)), the iteration bound without slack.
  static long rescale_bound(const ConeSpec& spec, double eps) {
    return static_cast<long>(std::ceil(spec.rank() / kPhiTwo * std::log(1.0 / eps)));
  }

  long rescale_budget(const ConeSpec& spec) const {
    if (max_rescale_iters) return *max_rescale_iters;
    return rescale_bound(spec, eps) + 8;
  }
};

}  // namespace chubanov

#endif  // CHUBANOV_CONFIG_HPP
