#ifndef CHUBANOV_SDP_HPP
#define CHUBANOV_SDP_HPP

// Single-block PSD solver written directly in matrix arithmetic: constraints
// are symmetric matrices a_i with tr(a_i x) = 0, Q_w(x) = w x w, and each
// rescaling replaces a_i by n w^{-1/2} a_i w^{-1/2}. Independent of the
// generic Element machinery; used to cross-check it.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chubanov/algebra.hpp"
#include "chubanov/config.hpp"
#include "chubanov/errors.hpp"
#include "chubanov/projection.hpp"

namespace chubanov::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Problem {
  int n = 0;
  std::vector<MatrixXd> a;
};

/// Converts an instance over a single PSD block: row i becomes smat(row i).
inline Problem from_instance(const ProblemInstance& inst) {
  const ConeSpec& spec = *inst.spec;
  if (spec.num_blocks() != 1 || spec.block(0).kind != BlockKind::psd)
    throw StructuralError("sdp::from_instance needs a single PSD block");
  Problem p;
  p.n = spec.block(0).n;
  for (int i = 0; i < inst.rows(); ++i) p.a.push_back(smat(inst.A.row(i).transpose(), p.n));
  return p;
}

inline double frob_inner(const MatrixXd& x, const MatrixXd& y) { return (x.array() * y.array()).sum(); }

/// Orthogonal projection onto {x : tr(a_i x) = 0} via the Gram matrix tr(a_i a_j).
class Projector {
 public:
  explicit Projector(const std::vector<MatrixXd>& a) : a_(a) {
    const auto m = static_cast<Eigen::Index>(a_.size());
    MatrixXd g(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) g(i, j) = g(j, i) = frob_inner(a_[i], a_[j]);
    gram_.compute(g);
  }

  MatrixXd operator()(const MatrixXd& x) const {
    if (a_.empty()) return x;
    VectorXd rhs(static_cast<Eigen::Index>(a_.size()));
    for (std::size_t i = 0; i < a_.size(); ++i) rhs(static_cast<Eigen::Index>(i)) = frob_inner(a_[i], x);
    const VectorXd u = gram_.solve(rhs);
    MatrixXd out = x;
    for (std::size_t i = 0; i < a_.size(); ++i) out -= u(static_cast<Eigen::Index>(i)) * a_[i];
    return out;
  }

 private:
  std::vector<MatrixXd> a_;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> gram_;
};

enum class Status { primal, dual, epsilon_infeasible, budget_exceeded };

struct Result {
  Status status = Status::budget_exceeded;
  MatrixXd point;  // primal: x with tr(a_i x) = 0 in the original problem; dual: y in range of the a_i, y >= 0
  double eps_tilde = 0.0;
  long rescale_iterations = 0;
  long bp_iterations = 0;
};

struct Observer {
  /// Every Basic Procedure iterate y (trace 1), including the starting I/n.
  std::function<void(long outer, long inner, const MatrixXd& y)> on_iterate;
  /// After w is formed and the ledger updated.
  std::function<void(long outer, const MatrixXd& w, double rho, double eps_tilde)> on_rescale;
};

namespace detail {

inline bool interior(const VectorXd& ev, double tol) {
  return ev.minCoeff() > tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
}

inline bool closed_psd(const VectorXd& ev, double tol) {
  return ev.minCoeff() >= -tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
}

enum class BpStatus { primal, dual, threshold };

struct BpResult {
  BpStatus status;
  MatrixXd point;
  MatrixXd projected;
  long iterations;
};

inline BpResult basic_procedure(const Projector& proj, int n, const SolverConfig& cfg, long outer,
                                const Observer& obs) {
  const double tau = 1.0 / (2.0 * n);
  const long budget = cfg.max_bp_iters ? *cfg.max_bp_iters : 4L * n * n;
  MatrixXd y = MatrixXd::Identity(n, n) / n;
  MatrixXd z = proj(y);
  long it = 0;
  if (obs.on_iterate) obs.on_iterate(outer, it, y);
  for (;;) {
    const double z_norm = z.norm();
    Eigen::SelfAdjointEigenSolver<MatrixXd> ez(z);
    if (cfg.bp_stop == BpStop::z_zero) {
      if (z_norm <= cfg.tol_zero * std::max(1.0, y.norm())) return {BpStatus::dual, y, z, it};
    } else {
      const MatrixXd diff = y - z;
      Eigen::SelfAdjointEigenSolver<MatrixXd> ed(diff, Eigen::EigenvaluesOnly);
      if (closed_psd(ed.eigenvalues(), cfg.tol_zero)) {
        if (diff.norm() <= cfg.tol_zero * std::max(1.0, y.norm())) return {BpStatus::primal, z, z, it};
        return {BpStatus::dual, diff, z, it};
      }
    }
    if (interior(ez.eigenvalues(), cfg.tol_int)) return {BpStatus::primal, z, z, it};
    if (z_norm <= tau * y.trace()) return {BpStatus::threshold, y, z, it};
    if (it >= budget) throw Error("sdp basic procedure exceeded its budget");

    const VectorXd v = ez.eigenvectors().col(0);
    const MatrixXd c = v * v.transpose();
    const MatrixXd p = proj(c);
    if (p.norm() <= cfg.tol_zero * std::max(1.0, c.norm())) return {BpStatus::dual, c, p, it};
    Eigen::SelfAdjointEigenSolver<MatrixXd> ep(p, Eigen::EigenvaluesOnly);
    if (interior(ep.eigenvalues(), cfg.tol_int)) return {BpStatus::primal, p, p, it};
    if (p.norm() <= tau) return {BpStatus::threshold, c, p, it};

    const double alpha = frob_inner(p, p - z) / (z - p).squaredNorm();
    y = alpha * y + (1.0 - alpha) * c;
    z = proj(y);
    ++it;
    if (obs.on_iterate) obs.on_iterate(outer, it, y);
  }
}

}  // namespace detail

/// Main loop over one PSD block of order n.
inline Result solve(const Problem& prob, const SolverConfig& cfg, const Observer& obs = {}) {
  const int n = prob.n;
  if (n < 1) throw StructuralError("sdp::solve needs n >= 1");
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  Result res;
  if (cfg.eps * n >= 1.0) {
    res.status = Status::epsilon_infeasible;
    return res;
  }
  const long budget = cfg.max_rescale_iters
                          ? *cfg.max_rescale_iters
                          : static_cast<long>(std::ceil(n / kPhiTwo * std::log(1.0 / cfg.eps))) + 8;
  std::vector<MatrixXd> a = prob.a;
  // x = M z M^T maps scaled points back; y = M^{-T} c M^{-1} maps dual points back.
  MatrixXd m = MatrixXd::Identity(n, n);
  MatrixXd m_inv = MatrixXd::Identity(n, n);
  const double sn = std::sqrt(static_cast<double>(n));

  for (long outer = 0; outer < budget; ++outer) {
    const Projector proj(a);
    detail::BpResult bp;
    try {
      bp = detail::basic_procedure(proj, n, cfg, outer, obs);
    } catch (const Error&) {
      res.status = Status::budget_exceeded;
      return res;
    }
    res.bp_iterations += bp.iterations;
    if (bp.status == detail::BpStatus::primal) {
      res.status = Status::primal;
      res.point = m * bp.point * m.transpose();
      return res;
    }
    if (bp.status == detail::BpStatus::dual) {
      res.status = Status::dual;
      res.point = m_inv.transpose() * bp.point * m_inv;
      return res;
    }

    const MatrixXd& y = bp.point;
    const double rho = y.trace() / (n * bp.projected.norm());
    const double beta = n - (1.0 / rho - 1.0 / std::sqrt(rho * (3.0 * rho - 2.0)));
    const MatrixXd w = ((n - beta) / y.trace()) * rho * n * y + beta * MatrixXd::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<MatrixXd> ew(w);
    const VectorXd lw = ew.eigenvalues();
    res.eps_tilde += std::log(static_cast<double>(n)) - lw.array().log().sum() / n;
    ++res.rescale_iterations;
    if (obs.on_rescale) obs.on_rescale(outer, w, rho, res.eps_tilde);
    if (res.eps_tilde < std::log(static_cast<double>(n)) + std::log(cfg.eps)) {
      res.status = Status::epsilon_infeasible;
      return res;
    }

    const MatrixXd w_inv_sqrt = ew.eigenvectors() * lw.cwiseSqrt().cwiseInverse().asDiagonal() *
                                ew.eigenvectors().transpose();
    const MatrixXd w_sqrt = ew.eigenvectors() * lw.cwiseSqrt().asDiagonal() * ew.eigenvectors().transpose();
    for (auto& ai : a) ai = n * (w_inv_sqrt * ai * w_inv_sqrt);
    m = m * (sn * w_inv_sqrt);
    m_inv = (w_sqrt / sn) * m_inv;
  }
  res.status = Status::budget_exceeded;
  return res;
}

}  // namespace chubanov::sdp

#endif  // CHUBANOV_SDP_HPP
