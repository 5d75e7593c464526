#ifndef CHUBANOV_PROJECTION_HPP
#define CHUBANOV_PROJECTION_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chubanov/algebra.hpp"
#include "chubanov/errors.hpp"

namespace chubanov {

/// Homogeneous system A x = 0, x in int K. A acts on natural coordinates.
struct ProblemInstance {
  SpecPtr spec;
  Eigen::MatrixXd A;

  ProblemInstance() = default;
  ProblemInstance(SpecPtr s, Eigen::MatrixXd a) : spec(std::move(s)), A(std::move(a)) { validate(); }

  int rows() const { return static_cast<int>(A.rows()); }

  void validate() const {
    if (!spec) throw StructuralError("problem instance has no cone spec");
    if (A.cols() != spec->dim())
      throw StructuralError("A has " + std::to_string(A.cols()) + " columns, cone dimension is " +
                            std::to_string(spec->dim()));
    if (!A.allFinite()) throw StructuralError("A has non-finite entries");
  }

  /// A* u = W^{-1} A^T u, the adjoint under the trace inner product.
  Element adjoint(const Eigen::VectorXd& u) const {
    return Element(spec, (A.transpose() * u).cwiseQuotient(spec->gram_weights()));
  }
};

/// Orthogonal projector onto ker A with respect to the trace inner product:
/// P = I - W^{-1} A^T (A W^{-1} A^T)^{-1} A, restricted to an independent row
/// subset found by pivoted Cholesky of A W^{-1} A^T.
class Projector {
 public:
  static constexpr double kDropTolerance = 1e-12;

  explicit Projector(const ProblemInstance& inst) : spec_(inst.spec) {
    inst.validate();
    winv_ = spec_->gram_weights().cwiseInverse();
    const Eigen::Index d = inst.A.cols();

    // Row equilibration leaves ker A unchanged.
    std::vector<int> nonzero;
    Eigen::MatrixXd rows(inst.A.rows(), d);
    for (Eigen::Index i = 0; i < inst.A.rows(); ++i) {
      const double nrm = std::sqrt(inst.A.row(i).cwiseAbs2().dot(winv_.transpose()));
      if (nrm > 0.0 && std::isfinite(nrm)) {
        rows.row(static_cast<Eigen::Index>(nonzero.size())) = inst.A.row(i) / nrm;
        nonzero.push_back(static_cast<int>(i));
      }
    }
    rows.conservativeResize(static_cast<Eigen::Index>(nonzero.size()), d);

    const Eigen::Index m = rows.rows();
    Eigen::MatrixXd g = rows * winv_.asDiagonal() * rows.transpose();
    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    const double max_diag = m > 0 ? g.diagonal().maxCoeff() : 0.0;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < m; ++k) {
      Eigen::Index j;
      const double piv = g.diagonal().tail(m - k).maxCoeff(&j);
      j += k;
      if (!(piv > kDropTolerance * max_diag)) break;
      if (j != k) {
        g.row(k).swap(g.row(j));
        g.col(k).swap(g.col(j));
        l.row(k).swap(l.row(j));
        std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(j)]);
      }
      const double lkk = std::sqrt(g(k, k));
      l(k, k) = lkk;
      for (Eigen::Index i = k + 1; i < m; ++i) l(i, k) = g(i, k) / lkk;
      for (Eigen::Index c = k + 1; c < m; ++c)
        for (Eigen::Index r = k + 1; r < m; ++r) g(r, c) -= l(r, k) * l(c, k);
      ++rank;
    }

    Eigen::MatrixXd selected(rank, d);
    for (Eigen::Index k = 0; k < rank; ++k) {
      selected.row(k) = rows.row(perm[static_cast<std::size_t>(k)]);
      retained_.push_back(nonzero[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])]);
    }
    basis_ = l.topLeftCorner(rank, rank).triangularView<Eigen::Lower>().solve(selected);

    // Second orthonormalization pass (Cholesky-QR2) against rounding in the
    // normal equations: afterwards basis_ W^{-1} basis_^T = I to working precision.
    if (rank > 0) {
      const Eigen::MatrixXd g2 = basis_ * winv_.asDiagonal() * basis_.transpose();
      Eigen::LLT<Eigen::MatrixXd> llt(g2);
      if (llt.info() == Eigen::Success) basis_ = llt.matrixL().solve(basis_);
    }
    std::sort(retained_.begin(), retained_.end());
  }

  /// P x.
  Element project(const Element& x) const {
    if (!(x.spec() == *spec_)) throw StructuralError("projector applied to an element of a different cone");
    if (basis_.rows() == 0) return x;
    const Eigen::VectorXd coeff = basis_ * x.coords();
    return Element(x.spec_ptr(), x.coords() - winv_.cwiseProduct(basis_.transpose() * coeff));
  }

  Element operator()(const Element& x) const { return project(x); }

  /// Indices of the rows of A kept after dependent rows were dropped.
  const std::vector<int>& retained_rows() const { return retained_; }
  int rank() const { return static_cast<int>(basis_.rows()); }
  const SpecPtr& spec_ptr() const { return spec_; }

 private:
  SpecPtr spec_;
  Eigen::VectorXd winv_;
  Eigen::MatrixXd basis_;  // rows span range(A^T), W^{-1}-orthonormal
  std::vector<int> retained_;
};

inline Projector build_projector(const ProblemInstance& inst) { return Projector(inst); }

inline Element project(const Projector& p, const Element& x) { return p.project(x); }

}  // namespace chubanov

#endif  // CHUBANOV_PROJECTION_HPP
