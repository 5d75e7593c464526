#ifndef CHUBANOV_SOLVER_HPP
#define CHUBANOV_SOLVER_HPP

// Main loop: Basic Procedure, per-block rescaling, the eps_k log-volume
// ledger, and mapping certificates of the rescaled problem back to the
// original one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "chubanov/algebra.hpp"
#include "chubanov/basic_procedure.hpp"
#include "chubanov/config.hpp"
#include "chubanov/errors.hpp"
#include "chubanov/projection.hpp"
#include "chubanov/rescale.hpp"

namespace chubanov {

/// Matrix of the inverse of Q_{w^{-1/2} sqrt(r_k)}, i.e. Q_{w^{1/2} / sqrt(r_k)}.
inline Eigen::MatrixXd block_scaling_inverse(const Element& w_block, int r_k) {
  if (w_block.spec().num_blocks() != 1) throw StructuralError("block_scaling_inverse expects a single-block element");
  const BlockSpec& b = w_block.spec().block(0);
  const Element u = sqrt(w_block) * (1.0 / std::sqrt(static_cast<double>(r_k)));
  const int d = b.dim();
  Eigen::MatrixXd m(d, d);
  for (int j = 0; j < d; ++j) m.col(j) = block_ops::quad(b, u.coords(), Eigen::VectorXd::Unit(d, j));
  return m;
}

/// Accumulated per-block automorphisms Q^1_k ... Q^i_k and the eps_k ledger.
class ScalingState {
 public:
  explicit ScalingState(SpecPtr spec) : spec_(std::move(spec)) {
    for (std::size_t k = 0; k < spec_->num_blocks(); ++k) {
      const int d = spec_->block_dim(k);
      forward_.push_back(Eigen::MatrixXd::Identity(d, d));
      inverse_.push_back(Eigen::MatrixXd::Identity(d, d));
    }
    eps_.assign(spec_->num_blocks(), 0.0);
  }

  /// Appends Q on the right of block k's composition.
  void apply(std::size_t k, const Eigen::MatrixXd& q, const Eigen::MatrixXd& q_inverse, double log_volume_delta) {
    forward_.at(k) = forward_[k] * q;
    inverse_.at(k) = q_inverse * inverse_[k];
    eps_.at(k) += log_volume_delta;
  }

  void advance() { ++iteration_; }

  const Eigen::MatrixXd& forward(std::size_t k) const { return forward_.at(k); }
  const Eigen::MatrixXd& inverse(std::size_t k) const { return inverse_.at(k); }
  double eps(std::size_t k) const { return eps_.at(k); }
  const std::vector<double>& eps_ledger() const { return eps_; }
  long iteration() const { return iteration_; }
  const SpecPtr& spec_ptr() const { return spec_; }

  /// x = Q^1 ... Q^i z: a point of the rescaled problem mapped to the original.
  Element map_primal(const Element& z) const {
    Element out = Element::zero(spec_);
    for (std::size_t k = 0; k < spec_->num_blocks(); ++k) out.block(k) = forward_[k] * z.block(k);
    return out;
  }

  /// Inverse of map_primal, (Q^i)^{-1} ... (Q^1)^{-1} x.
  Element map_primal_inverse(const Element& x) const {
    Element out = Element::zero(spec_);
    for (std::size_t k = 0; k < spec_->num_blocks(); ++k) out.block(k) = inverse_[k] * x.block(k);
    return out;
  }

  /// y = (M*)^{-1} c with M the accumulated map: carries range((A M)*) onto
  /// range(A*) and K onto K. Each factor is self-adjoint, so per block this is
  /// the transpose of the accumulated inverse.
  Element map_dual(const Element& c) const {
    Element out = Element::zero(spec_);
    for (std::size_t k = 0; k < spec_->num_blocks(); ++k) out.block(k) = inverse_[k].transpose() * c.block(k);
    return out;
  }

 private:
  SpecPtr spec_;
  std::vector<Eigen::MatrixXd> forward_;
  std::vector<Eigen::MatrixXd> inverse_;
  std::vector<double> eps_;
  long iteration_ = 0;
};

// ---------------------------------------------------------------------------
// Certificates

struct RescaleRecord {
  long iteration = 0;
  std::size_t block = 0;
  double rho = 0.0;
  Eigen::VectorXd w_eigenvalues;
  double delta = 0.0;
};

struct SolveStats {
  long bp_iterations = 0;
  long rescale_iterations = 0;
  std::vector<double> eps_ledger;
  std::vector<long> good_iterations;  // per block, iterations with rho_k >= 2
};

struct PrimalCertificate {
  Element x;
};

struct DualCertificate {
  Element y;
  Eigen::VectorXd u;
};

struct EpsilonInfeasibleCertificate {
  std::size_t block = 0;
  double eps_k = 0.0;
  double threshold = 0.0;  // log r_k + log eps
  double eps = 0.0;
  bool trivial = false;    // eps >= 1/r_k, no iterations were run
  std::string note;
  std::vector<RescaleRecord> transcript;
};

struct BudgetExceededCertificate {
  std::string reason;
};

enum class CertificateKind { primal, dual, epsilon_infeasible, budget_exceeded };

inline const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::primal: return "primal";
    case CertificateKind::dual: return "dual";
    case CertificateKind::epsilon_infeasible: return "epsilon_infeasible";
    case CertificateKind::budget_exceeded: return "budget_exceeded";
  }
  return "?";
}

struct Certificate {
  std::variant<PrimalCertificate, DualCertificate, EpsilonInfeasibleCertificate, BudgetExceededCertificate> payload;
  SolveStats stats;

  CertificateKind kind() const { return static_cast<CertificateKind>(payload.index()); }
  const PrimalCertificate& primal() const { return std::get<PrimalCertificate>(payload); }
  const DualCertificate& dual() const { return std::get<DualCertificate>(payload); }
  const EpsilonInfeasibleCertificate& epsilon_infeasible() const {
    return std::get<EpsilonInfeasibleCertificate>(payload);
  }
};

/// Least-squares u with A* u closest to y in the trace norm.
inline Eigen::VectorXd fit_dual_multipliers(const ProblemInstance& inst, const Element& y) {
  if (inst.rows() == 0) return Eigen::VectorXd();
  const Eigen::VectorXd w = inst.spec->gram_weights();
  const Eigen::VectorXd wsqrt = w.cwiseSqrt();
  // min || W^{1/2} (W^{-1} A^T u - y) || = || W^{-1/2} A^T u - W^{1/2} y ||
  const Eigen::MatrixXd lhs = wsqrt.cwiseInverse().asDiagonal() * inst.A.transpose();
  const Eigen::VectorXd rhs = wsqrt.cwiseProduct(y.coords());
  return lhs.colPivHouseholderQr().solve(rhs);
}

// ---------------------------------------------------------------------------
// Solve

/// Optional hooks into the main loop, for tracing and tests.
struct SolverObserver {
  std::function<void(long iteration, const BasicStep&)> on_basic_step;
  std::function<void(long iteration, const BasicOutcome&)> on_basic_outcome;
  /// After the rescaling of `iteration` is applied. `next_A` is A^{i+1}.
  std::function<void(long iteration, const RescaleDecision&, const ScalingState&, const Eigen::MatrixXd& next_A)>
      on_rescale;
};

inline Certificate solve(const ProblemInstance& inst, const SolverConfig& cfg, const SolverObserver& obs = {}) {
  inst.validate();
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  const SpecPtr& spec = inst.spec;
  const std::size_t nblocks = spec->num_blocks();

  Certificate cert;
  cert.stats.eps_ledger.assign(nblocks, 0.0);
  cert.stats.good_iterations.assign(nblocks, 0);

  for (std::size_t k = 0; k < nblocks; ++k) {
    const int r_k = spec->block_rank(k);
    if (cfg.eps * r_k >= 1.0) {
      EpsilonInfeasibleCertificate e;
      e.block = k;
      e.eps_k = 0.0;
      e.eps = cfg.eps;
      e.threshold = std::log(static_cast<double>(r_k)) + std::log(cfg.eps);
      e.trivial = true;
      e.note = "eps >= 1/r_k: every scaled-feasible x has lambda_min(x_k) <= 1/r_k <= eps";
      cert.payload = std::move(e);
      return cert;
    }
  }

  ScalingState state(spec);
  std::vector<RescaleRecord> transcript;
  Eigen::MatrixXd a_cur = inst.A;
  const Element y_start = Element::identity(spec) * (1.0 / spec->rank());
  const long budget = cfg.rescale_budget(*spec);

  for (long it = 0;; ++it) {
    if (it >= budget) {
      cert.stats.eps_ledger = state.eps_ledger();
      cert.payload = BudgetExceededCertificate{"rescale budget of " + std::to_string(budget) + " iterations exhausted"};
      return cert;
    }
    const Projector proj(ProblemInstance(spec, a_cur));
    BasicObserver bp_obs;
    if (obs.on_basic_step) bp_obs = [&](const BasicStep& s) { obs.on_basic_step(it, s); };

    BasicOutcome out;
    try {
      out = run_basic(proj, y_start, cfg, bp_obs);
    } catch (const BudgetExceededError& e) {
      cert.stats.bp_iterations += e.iterations();
      cert.stats.eps_ledger = state.eps_ledger();
      cert.payload = BudgetExceededCertificate{e.what()};
      return cert;
    }
    cert.stats.bp_iterations += out.iterations;
    if (obs.on_basic_outcome) obs.on_basic_outcome(it, out);

    if (out.status == BasicStatus::primal_found) {
      cert.stats.eps_ledger = state.eps_ledger();
      cert.payload = PrimalCertificate{state.map_primal(out.point)};
      return cert;
    }
    if (out.status == BasicStatus::dual_found) {
      Element y = state.map_dual(out.point);
      Eigen::VectorXd u = fit_dual_multipliers(inst, y);
      cert.stats.eps_ledger = state.eps_ledger();
      cert.payload = DualCertificate{std::move(y), std::move(u)};
      return cert;
    }

    const RescaleDecision dec = decide_rescale(out.point, out.projected);
    ++cert.stats.rescale_iterations;
    std::optional<std::size_t> stop_block;
    for (std::size_t k = 0; k < nblocks && !stop_block; ++k) {
      const BlockDecision& bd = dec.blocks[k];
      if (!bd.applied) continue;
      const int r_k = spec->block_rank(k);
      const Eigen::MatrixXd q = block_scaling(bd.w, r_k);
      state.apply(k, q, block_scaling_inverse(bd.w, r_k), bd.log_volume_delta);
      a_cur.middleCols(spec->offset(k), spec->block_dim(k)) *= q;
      if (bd.rho >= 2.0) ++cert.stats.good_iterations[k];
      transcript.push_back({it, k, bd.rho, bd.w_eigenvalues, bd.log_volume_delta});
      const double threshold = std::log(static_cast<double>(r_k)) + std::log(cfg.eps);
      if (state.eps(k) < threshold) stop_block = k;
    }
    state.advance();
    if (obs.on_rescale) obs.on_rescale(it, dec, state, a_cur);

    if (stop_block) {
      const std::size_t k = *stop_block;
      EpsilonInfeasibleCertificate e;
      e.block = k;
      e.eps_k = state.eps(k);
      e.eps = cfg.eps;
      e.threshold = std::log(static_cast<double>(spec->block_rank(k))) + std::log(cfg.eps);
      e.note = "eps_k fell below log r_k + log eps: no eps-feasible solution";
      e.transcript = std::move(transcript);
      cert.stats.eps_ledger = state.eps_ledger();
      cert.payload = std::move(e);
      return cert;
    }
  }
}

// ---------------------------------------------------------------------------
// Verification

struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<Check> checks;

  bool passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
};

/// Re-checks a certificate against the original instance from scratch.
inline VerificationReport verify(const ProblemInstance& inst, const Certificate& cert, double tol = 1e-8) {
  VerificationReport rep;
  auto add = [&](std::string name, double measured, double threshold, bool ok) {
    rep.checks.push_back({std::move(name), measured, threshold, ok});
  };

  switch (cert.kind()) {
    case CertificateKind::primal: {
      const Element& x = cert.primal().x;
      if (!(x.spec() == *inst.spec)) {
        add("shape", 0, 0, false);
        break;
      }
      add("finite", x.coords().allFinite() ? 1.0 : 0.0, 1.0, x.coords().allFinite());
      const double scale = inst.A.norm() * x.coords().norm();
      const double resid = (inst.A * x.coords()).norm();
      const double rel = scale > 0 ? resid / scale : resid;
      add("kernel_residual", rel, tol, rel <= tol);
      const double lmin = min_eigenvalue(x);
      add("interior", lmin, 0.0, lmin > 0.0);
      break;
    }
    case CertificateKind::dual: {
      const DualCertificate& d = cert.dual();
      if (!(d.y.spec() == *inst.spec) || d.u.size() != inst.rows()) {
        add("shape", 0, 0, false);
        break;
      }
      const double ynorm = norm(d.y);
      add("nonzero", ynorm, 0.0, ynorm > 0.0);
      const Eigen::VectorXd ev = eigenvalues(d.y);
      const double scale = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
      add("cone_membership", ev.minCoeff() / scale, -tol, ev.minCoeff() >= -tol * scale);
      const double resid = norm(d.y - inst.adjoint(d.u));
      const double rel = ynorm > 0 ? resid / ynorm : resid;
      add("range_residual", rel, tol, rel <= tol);
      break;
    }
    case CertificateKind::epsilon_infeasible: {
      const EpsilonInfeasibleCertificate& e = cert.epsilon_infeasible();
      if (e.block >= inst.spec->num_blocks()) {
        add("block_index", static_cast<double>(e.block), static_cast<double>(inst.spec->num_blocks()), false);
        break;
      }
      const int r_k = inst.spec->block_rank(e.block);
      const double threshold = std::log(static_cast<double>(r_k)) + std::log(e.eps);
      add("threshold", e.threshold, threshold, std::abs(e.threshold - threshold) <= tol * std::max(1.0, std::abs(threshold)));
      if (e.trivial) {
        add("trivial_case", e.eps * r_k, 1.0, e.eps * r_k >= 1.0);
        break;
      }
      double replay = 0.0;
      bool w_ok = true;
      for (const auto& rec : e.transcript) {
        if (rec.block != e.block) continue;
        if (rec.w_eigenvalues.size() != r_k || !(rec.w_eigenvalues.minCoeff() > 0.0) || !(rec.rho > 1.0)) {
          w_ok = false;
          continue;
        }
        replay += volume_delta_from_eigenvalues(rec.w_eigenvalues);
      }
      add("w_interior", w_ok ? 1.0 : 0.0, 1.0, w_ok);
      const double err = std::abs(replay - e.eps_k);
      add("ledger_replay", err, tol * std::max(1.0, std::abs(e.eps_k)), err <= tol * std::max(1.0, std::abs(e.eps_k)));
      add("stop_test", e.eps_k, threshold, e.eps_k < threshold);
      break;
    }
    case CertificateKind::budget_exceeded:
      add("certificate_present", 0.0, 1.0, false);
      break;
  }
  return rep;
}

}  // namespace chubanov

#endif  // CHUBANOV_SOLVER_HPP
