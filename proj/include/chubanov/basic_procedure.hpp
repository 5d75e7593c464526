#ifndef CHUBANOV_BASIC_PROCEDURE_HPP
#define CHUBANOV_BASIC_PROCEDURE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "chubanov/algebra.hpp"
#include "chubanov/config.hpp"
#include "chubanov/errors.hpp"
#include "chubanov/projection.hpp"

namespace chubanov {

enum class BasicStatus { primal_found, dual_found, threshold_met };

inline const char* to_string(BasicStatus s) {
  switch (s) {
    case BasicStatus::primal_found: return "primal_found";
    case BasicStatus::dual_found: return "dual_found";
    case BasicStatus::threshold_met: return "threshold_met";
  }
  return "?";
}

/// Result of one Basic Procedure run.
///
/// primal_found:  `point` is z in int K with P z = z.
/// dual_found:    `point` is c in K, c != 0, with P c = 0 (so c is in range A*).
/// threshold_met: `point` is y in int K, <e, y> = 1, and `projected` = P y
///                satisfies ||P y|| <= ||y||_{1,inf} / (2 r_max sqrt(l)).
struct BasicOutcome {
  BasicStatus status = BasicStatus::threshold_met;
  Element point;
  Element projected;
  long iterations = 0;
};

/// One executed update y' = alpha y + (1 - alpha) c.
struct BasicStep {
  long index = 0;
  Element y;           // iterate before the update
  Element z;           // P y
  Element c;           // idempotent attaining lambda_min(z)
  Element p;           // P c
  double lambda_min = 0.0;
  double alpha = 0.0;
  double z_norm = 0.0;       // ||P y||
  double z_next_norm = 0.0;  // ||P y'||
};

using BasicObserver = std::function<void(const BasicStep&)>;

/// The iteration budget ran out before any stopping test fired.
class BudgetExceededError : public Error {
 public:
  BudgetExceededError(Element last_y, long iterations)
      : Error("basic procedure exceeded its budget of " + std::to_string(iterations) + " iterations"),
        last_y_(std::move(last_y)),
        iterations_(iterations) {}

  const Element& last_y() const { return last_y_; }
  long iterations() const { return iterations_; }

 private:
  Element last_y_;
  long iterations_;
};

/// 1 / (2 r_max sqrt(l)).
inline double threshold_factor(const ConeSpec& spec) {
  return 1.0 / (2.0 * spec.max_rank() * std::sqrt(static_cast<double>(spec.num_blocks())));
}

namespace detail {

inline bool is_negligible(const Element& v, double reference, double tol_zero) {
  return norm(v) <= tol_zero * std::max(1.0, reference);
}

inline bool in_closed_cone(const Element& v, double tol_zero) {
  const Eigen::VectorXd ev = eigenvalues(v);
  return ev.minCoeff() >= -tol_zero * std::max(1.0, ev.cwiseAbs().maxCoeff());
}

}  // namespace detail

/// Von Neumann-type Basic Procedure. Starts from y_init in int K with
/// <e, y_init> = 1 and returns a primal point, a dual point, or a y meeting
/// the rescaling threshold. Throws BudgetExceededError after
/// cfg.bp_budget(spec) updates.
inline BasicOutcome run_basic(const Projector& proj, const Element& y_init, const SolverConfig& cfg,
                              const BasicObserver& observer = {}) {
  const ConeSpec& spec = y_init.spec();
  const double tau = threshold_factor(spec);
  const long budget = cfg.bp_budget(spec);

  Element y = y_init;
  Element z = proj(y);
  long iters = 0;

  for (;;) {
    const double z_norm = norm(z);
    if (cfg.bp_stop == BpStop::z_zero) {
      if (detail::is_negligible(z, norm(y), cfg.tol_zero))
        return {BasicStatus::dual_found, y, z, iters};
    } else {
      Element diff = y - z;
      if (detail::in_closed_cone(diff, cfg.tol_zero)) {
        if (detail::is_negligible(diff, norm(y), cfg.tol_zero)) return {BasicStatus::primal_found, z, z, iters};
        return {BasicStatus::dual_found, std::move(diff), z, iters};
      }
    }
    if (is_interior(z, cfg.tol_int)) return {BasicStatus::primal_found, z, z, iters};
    if (z_norm <= tau * one_inf_norm_in_cone(y)) return {BasicStatus::threshold_met, y, z, iters};

    if (iters >= budget) throw BudgetExceededError(y, iters);

    MinEigen me = lambda_min(z);
    Element& c = me.idempotent;
    Element p = proj(c);
    if (detail::is_negligible(p, norm(c), cfg.tol_zero)) return {BasicStatus::dual_found, c, p, iters};
    if (is_interior(p, cfg.tol_int)) return {BasicStatus::primal_found, p, p, iters};
    // ||c||_{1,inf} = 1 for a primitive idempotent with <e, c> = 1.
    if (norm(p) <= tau) return {BasicStatus::threshold_met, c, p, iters};

    const Element zp = z - p;
    const double alpha = inner(p, p - z) / inner(zp, zp);
    Element y_next = alpha * y + (1.0 - alpha) * c;
    y_next *= 1.0 / trace(y_next);
    Element z_next = proj(y_next);
    ++iters;
    if (observer) {
      BasicStep step;
      step.index = iters;
      step.y = y;
      step.z = z;
      step.c = c;
      step.p = p;
      step.lambda_min = me.value;
      step.alpha = alpha;
      step.z_norm = z_norm;
      step.z_next_norm = norm(z_next);
      observer(step);
    }
    y = std::move(y_next);
    z = std::move(z_next);
  }
}

}  // namespace chubanov

#endif  // CHUBANOV_BASIC_PROCEDURE_HPP
