#ifndef CHUBANOV_ALGEBRA_HPP
#define CHUBANOV_ALGEBRA_HPP

// Euclidean Jordan algebra kernel for products of simple blocks:
// the half-line (rank 1), second-order cones and PSD cones.
//
// Coordinates. Rank1 blocks hold one scalar. SOC(n) blocks hold (x1, xbar)
// in R^n. PSD(n) blocks hold the n(n+1)/2 upper-triangle entries in
// column-major order (1,1),(1,2),(2,2),(1,3),... with off-diagonal entries
// multiplied by sqrt(2), so the coordinate dot product of two PSD blocks is
// the trace inner product. On SOC blocks the trace inner product is twice the
// coordinate dot product.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chubanov/errors.hpp"

namespace chubanov {

enum class BlockKind { rank1, soc, psd };

/// One simple block: Rank1, SOC(n >= 2) or PSD(n >= 1).
struct BlockSpec {
  BlockKind kind = BlockKind::rank1;
  int n = 1;

  static BlockSpec rank1() { return {BlockKind::rank1, 1}; }
  static BlockSpec soc(int dim) {
    if (dim < 2) throw DomainError("SOC block needs dimension >= 2");
    return {BlockKind::soc, dim};
  }
  static BlockSpec psd(int order) {
    if (order < 1) throw DomainError("PSD block needs order >= 1");
    return {BlockKind::psd, order};
  }

  int rank() const {
    switch (kind) {
      case BlockKind::rank1: return 1;
      case BlockKind::soc: return 2;
      case BlockKind::psd: return n;
    }
    return 0;
  }
  int dim() const {
    switch (kind) {
      case BlockKind::rank1: return 1;
      case BlockKind::soc: return n;
      case BlockKind::psd: return n * (n + 1) / 2;
    }
    return 0;
  }
  /// Weight of this block's coordinates in the trace inner product.
  double gram_weight() const { return kind == BlockKind::soc ? 2.0 : 1.0; }

  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

inline std::string to_string(const BlockSpec& b) {
  switch (b.kind) {
    case BlockKind::rank1: return "rank1";
    case BlockKind::soc: return "soc(" + std::to_string(b.n) + ")";
    case BlockKind::psd: return "psd(" + std::to_string(b.n) + ")";
  }
  return "?";
}

/// Ordered list of simple blocks K = K_1 x ... x K_l.
class ConeSpec {
 public:
  explicit ConeSpec(std::vector<BlockSpec> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw StructuralError("cone spec needs at least one block");
    offsets_.reserve(blocks_.size() + 1);
    offsets_.push_back(0);
    for (const auto& b : blocks_) {
      if (b.kind == BlockKind::soc && b.n < 2) throw DomainError("SOC block needs dimension >= 2");
      if (b.kind == BlockKind::psd && b.n < 1) throw DomainError("PSD block needs order >= 1");
      if (b.kind == BlockKind::rank1 && b.n != 1) throw DomainError("rank1 block has n == 1");
      offsets_.push_back(offsets_.back() + b.dim());
      rank_ += b.rank();
      max_rank_ = std::max(max_rank_, b.rank());
    }
  }

  std::size_t num_blocks() const { return blocks_.size(); }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  const BlockSpec& block(std::size_t k) const { return blocks_.at(k); }
  int offset(std::size_t k) const { return offsets_.at(k); }
  int block_dim(std::size_t k) const { return blocks_.at(k).dim(); }
  int block_rank(std::size_t k) const { return blocks_.at(k).rank(); }
  int dim() const { return offsets_.back(); }
  int rank() const { return rank_; }
  int max_rank() const { return max_rank_; }

  /// Per-coordinate weights W with <x, y> = x^T W y.
  Eigen::VectorXd gram_weights() const {
    Eigen::VectorXd w(dim());
    for (std::size_t k = 0; k < blocks_.size(); ++k)
      w.segment(offsets_[k], blocks_[k].dim()).setConstant(blocks_[k].gram_weight());
    return w;
  }

  friend bool operator==(const ConeSpec& a, const ConeSpec& b) { return a.blocks_ == b.blocks_; }

 private:
  std::vector<BlockSpec> blocks_;
  std::vector<int> offsets_;
  int rank_ = 0;
  int max_rank_ = 0;
};

using SpecPtr = std::shared_ptr<const ConeSpec>;

inline SpecPtr make_spec(std::vector<BlockSpec> blocks) {
  return std::make_shared<const ConeSpec>(std::move(blocks));
}

/// R_+^count as `count` Rank1 blocks.
inline std::vector<BlockSpec> nonneg_blocks(int count) {
  return std::vector<BlockSpec>(static_cast<std::size_t>(count), BlockSpec::rank1());
}

// ---------------------------------------------------------------------------
// Symmetric-matrix vectorization

/// Position of entry (i, j), i <= j, in the packed upper triangle.
inline int svec_index(int i, int j) {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

inline Eigen::VectorXd svec(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd v(n * (n + 1) / 2);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i)
      v(svec_index(i, j)) = (i == j) ? m(i, j) : std::sqrt(2.0) * 0.5 * (m(i, j) + m(j, i));
  return v;
}

inline Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int n) {
  if (v.size() != n * (n + 1) / 2) throw StructuralError("smat: length does not match order");
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      const double x = (i == j) ? v(svec_index(i, j)) : v(svec_index(i, j)) / std::sqrt(2.0);
      m(i, j) = x;
      m(j, i) = x;
    }
  return m;
}

// ---------------------------------------------------------------------------
// Dense symmetric eigensolver

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, unit length
};

/// Cyclic Jacobi. Eigenvalues sorted descending; each eigenvector has its
/// first nonzero component positive. Returns false on non-convergence.
inline bool jacobi_eigen(const Eigen::MatrixXd& input, SymmetricEigen& out) {
  const int n = static_cast<int>(input.rows());
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double fro = a.norm();
  bool converged = (n <= 1) || fro == 0.0;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    double off = 0.0;
    for (int q = 1; q < n; ++q)
      for (int p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    if (off == 0.0 || std::sqrt(off) <= 1e-17 * fro) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double g = 100.0 * std::abs(apq);
        // Once an off-diagonal entry no longer affects its diagonal pair, drop it.
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) && std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        if (std::abs(apq) <= std::numeric_limits<double>::min()) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (int q = 1; q < n; ++q)
      for (int p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    if (std::sqrt(off) > 1e-12 * fro) return false;
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]);
    Eigen::VectorXd col = v.col(order[i]);
    for (int k = 0; k < n; ++k) {
      if (std::abs(col(k)) > 1e-12) {
        if (col(k) < 0) col = -col;
        break;
      }
    }
    out.vectors.col(i) = col;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Element

/// Block-structured vector in natural coordinates, tied to a ConeSpec.
class Element {
 public:
  Element() = default;
  Element(SpecPtr spec, Eigen::VectorXd coords) : spec_(std::move(spec)), coords_(std::move(coords)) {
    if (!spec_) throw StructuralError("element needs a cone spec");
    if (coords_.size() != spec_->dim())
      throw StructuralError("element has " + std::to_string(coords_.size()) +
                            " coordinates, cone dimension is " + std::to_string(spec_->dim()));
  }

  static Element zero(SpecPtr spec) {
    const int d = spec->dim();
    return Element(std::move(spec), Eigen::VectorXd::Zero(d));
  }

  static Element identity(SpecPtr spec) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(spec->dim());
    for (std::size_t k = 0; k < spec->num_blocks(); ++k) {
      const BlockSpec& b = spec->block(k);
      const int off = spec->offset(k);
      switch (b.kind) {
        case BlockKind::rank1:
        case BlockKind::soc: v(off) = 1.0; break;
        case BlockKind::psd:
          for (int i = 0; i < b.n; ++i) v(off + svec_index(i, i)) = 1.0;
          break;
      }
    }
    return Element(std::move(spec), std::move(v));
  }

  const ConeSpec& spec() const { return *spec_; }
  const SpecPtr& spec_ptr() const { return spec_; }
  const Eigen::VectorXd& coords() const { return coords_; }
  Eigen::VectorXd& coords() { return coords_; }
  int size() const { return static_cast<int>(coords_.size()); }

  auto block(std::size_t k) const { return coords_.segment(spec_->offset(k), spec_->block_dim(k)); }
  auto block(std::size_t k) { return coords_.segment(spec_->offset(k), spec_->block_dim(k)); }

  /// Block k as an element of the single-block algebra.
  Element block_element(std::size_t k) const {
    return Element(make_spec({spec_->block(k)}), Eigen::VectorXd(block(k)));
  }

  /// Element that equals `b` on block k and zero elsewhere.
  static Element embed(SpecPtr spec, std::size_t k, const Eigen::Ref<const Eigen::VectorXd>& b) {
    Element out = zero(std::move(spec));
    out.block(k) = b;
    return out;
  }

  Element& operator+=(const Element& o) {
    check_conforms(o);
    coords_ += o.coords_;
    return *this;
  }
  Element& operator-=(const Element& o) {
    check_conforms(o);
    coords_ -= o.coords_;
    return *this;
  }
  Element& operator*=(double a) {
    coords_ *= a;
    return *this;
  }
  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Element a, double s) { return a *= s; }
  friend Element operator*(double s, Element a) { return a *= s; }
  friend Element operator-(Element a) { return a *= -1.0; }

  void check_conforms(const Element& o) const {
    if (!spec_ || !o.spec_ || (spec_ != o.spec_ && !(*spec_ == *o.spec_)))
      throw StructuralError("elements belong to different cone specs");
  }

 private:
  SpecPtr spec_;
  Eigen::VectorXd coords_;
};

// ---------------------------------------------------------------------------
// Per-block kernels on raw coordinates

namespace block_ops {

using Vec = Eigen::VectorXd;
using CRef = Eigen::Ref<const Eigen::VectorXd>;

inline Vec jordan_product(const BlockSpec& b, const CRef& x, const CRef& y) {
  switch (b.kind) {
    case BlockKind::rank1: return Vec::Constant(1, x(0) * y(0));
    case BlockKind::soc: {
      Vec out(b.n);
      out(0) = x.dot(y);
      out.tail(b.n - 1) = x(0) * y.tail(b.n - 1) + y(0) * x.tail(b.n - 1);
      return out;
    }
    case BlockKind::psd: {
      const Eigen::MatrixXd xm = smat(x, b.n), ym = smat(y, b.n);
      return svec(0.5 * (xm * ym + ym * xm));
    }
  }
  return {};
}

inline double inner(const BlockSpec& b, const CRef& x, const CRef& y) { return b.gram_weight() * x.dot(y); }

inline double trace(const BlockSpec& b, const CRef& x) {
  switch (b.kind) {
    case BlockKind::rank1: return x(0);
    case BlockKind::soc: return 2.0 * x(0);
    case BlockKind::psd: {
      double t = 0.0;
      for (int i = 0; i < b.n; ++i) t += x(svec_index(i, i));
      return t;
    }
  }
  return 0.0;
}

struct Frame {
  Vec eigenvalues;               // descending
  std::vector<Vec> idempotents;  // block coordinates
};

inline Frame spectral(const BlockSpec& b, const CRef& x, std::size_t block_index = 0) {
  Frame f;
  switch (b.kind) {
    case BlockKind::rank1:
      f.eigenvalues = Vec::Constant(1, x(0));
      f.idempotents.push_back(Vec::Ones(1));
      break;
    case BlockKind::soc: {
      const double nrm = x.tail(b.n - 1).norm();
      Vec u = Vec::Zero(b.n - 1);
      if (nrm == 0.0)
        u(0) = 1.0;
      else
        u = x.tail(b.n - 1) / nrm;
      f.eigenvalues.resize(2);
      f.eigenvalues << x(0) + nrm, x(0) - nrm;
      Vec c1(b.n), c2(b.n);
      c1(0) = 0.5;
      c1.tail(b.n - 1) = 0.5 * u;
      c2(0) = 0.5;
      c2.tail(b.n - 1) = -0.5 * u;
      f.idempotents.push_back(std::move(c1));
      f.idempotents.push_back(std::move(c2));
      break;
    }
    case BlockKind::psd: {
      SymmetricEigen eig;
      if (!jacobi_eigen(smat(x, b.n), eig)) throw NumericalError("Jacobi eigensolver did not converge", block_index);
      f.eigenvalues = eig.values;
      for (int i = 0; i < b.n; ++i) {
        const Eigen::VectorXd v = eig.vectors.col(i);
        f.idempotents.push_back(svec(v * v.transpose()));
      }
      break;
    }
  }
  return f;
}

inline Vec eigenvalues(const BlockSpec& b, const CRef& x, std::size_t block_index = 0) {
  switch (b.kind) {
    case BlockKind::rank1: return Vec::Constant(1, x(0));
    case BlockKind::soc: {
      const double nrm = x.tail(b.n - 1).norm();
      Vec v(2);
      v << x(0) + nrm, x(0) - nrm;
      return v;
    }
    case BlockKind::psd: return spectral(b, x, block_index).eigenvalues;
  }
  return {};
}

/// Q_w(x) on one block.
inline Vec quad(const BlockSpec& b, const CRef& w, const CRef& x) {
  switch (b.kind) {
    case BlockKind::rank1: return Vec::Constant(1, w(0) * w(0) * x(0));
    case BlockKind::soc: {
      const auto wbar = w.tail(b.n - 1);
      const auto xbar = x.tail(b.n - 1);
      const double det = w(0) * w(0) - wbar.squaredNorm();
      Vec out(b.n);
      out(0) = w.squaredNorm() * x(0) + 2.0 * w(0) * wbar.dot(xbar);
      out.tail(b.n - 1) = 2.0 * w(0) * x(0) * wbar + det * xbar + 2.0 * wbar.dot(xbar) * wbar;
      return out;
    }
    case BlockKind::psd: {
      const Eigen::MatrixXd wm = smat(w, b.n);
      return svec(wm * smat(x, b.n) * wm);
    }
  }
  return {};
}

}  // namespace block_ops

// ---------------------------------------------------------------------------
// Element-level operations

namespace detail {

inline void require_conform(const Element& x, const Element& y) { x.check_conforms(y); }

template <typename F>
Element blockwise(const Element& x, F&& f) {
  Element out = Element::zero(x.spec_ptr());
  for (std::size_t k = 0; k < x.spec().num_blocks(); ++k) out.block(k) = f(k, x.spec().block(k));
  return out;
}

}  // namespace detail

inline Element jordan_product(const Element& x, const Element& y) {
  detail::require_conform(x, y);
  return detail::blockwise(x, [&](std::size_t k, const BlockSpec& b) {
    return block_ops::jordan_product(b, x.block(k), y.block(k));
  });
}

/// Trace inner product <x, y> = tr(x o y).
inline double inner(const Element& x, const Element& y) {
  detail::require_conform(x, y);
  double s = 0.0;
  for (std::size_t k = 0; k < x.spec().num_blocks(); ++k)
    s += block_ops::inner(x.spec().block(k), x.block(k), y.block(k));
  return s;
}

inline double trace(const Element& x) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.spec().num_blocks(); ++k) s += block_ops::trace(x.spec().block(k), x.block(k));
  return s;
}

inline double block_trace(const Element& x, std::size_t k) { return block_ops::trace(x.spec().block(k), x.block(k)); }

/// Jordan frames of every block.
struct SpectralDecomposition {
  std::vector<block_ops::Frame> blocks;

  /// Sum of lambda_i c_i, re-embedded in the full space.
  Eigen::VectorXd reconstruct() const {
    std::vector<Eigen::VectorXd> parts;
    Eigen::Index total = 0;
    for (const auto& f : blocks) {
      Eigen::VectorXd s = Eigen::VectorXd::Zero(f.idempotents.front().size());
      for (std::size_t i = 0; i < f.idempotents.size(); ++i) s += f.eigenvalues(static_cast<Eigen::Index>(i)) * f.idempotents[i];
      total += s.size();
      parts.push_back(std::move(s));
    }
    Eigen::VectorXd out(total);
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      out.segment(off, p.size()) = p;
      off += p.size();
    }
    return out;
  }
};

inline SpectralDecomposition spectral_decomposition(const Element& x) {
  SpectralDecomposition sd;
  for (std::size_t k = 0; k < x.spec().num_blocks(); ++k)
    sd.blocks.push_back(block_ops::spectral(x.spec().block(k), x.block(k), k));
  return sd;
}

/// All eigenvalues, block by block (each block descending).
inline Eigen::VectorXd eigenvalues(const Element& x) {
  Eigen::VectorXd out(x.spec().rank());
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < x.spec().num_blocks(); ++k) {
    const Eigen::VectorXd ev = block_ops::eigenvalues(x.spec().block(k), x.block(k), k);
    out.segment(off, ev.size()) = ev;
    off += ev.size();
  }
  return out;
}

struct MinEigen {
  double value = 0.0;
  Element idempotent;  // primitive, <e, c> = 1, zero outside `block`
  std::size_t block = 0;
};

/// Global minimum eigenvalue and an attaining primitive idempotent. Ties are
/// broken by lowest block index, then by frame order within the block.
inline MinEigen lambda_min(const Element& x) {
  MinEigen best;
  bool have = false;
  Eigen::VectorXd best_c;
  for (std::size_t k = 0; k < x.spec().num_blocks(); ++k) {
    const auto f = block_ops::spectral(x.spec().block(k), x.block(k), k);
    for (Eigen::Index i = 0; i < f.eigenvalues.size(); ++i) {
      if (!have || f.eigenvalues(i) < best.value) {
        have = true;
        best.value = f.eigenvalues(i);
        best.block = k;
        best_c = f.idempotents[static_cast<std::size_t>(i)];
      }
    }
  }
  best.idempotent = Element::embed(x.spec_ptr(), best.block, best_c);
  return best;
}

inline double min_eigenvalue(const Element& x) { return eigenvalues(x).minCoeff(); }

namespace detail {

template <typename F>
Element spectral_map(const Element& x, F&& f) {
  return blockwise(x, [&](std::size_t k, const BlockSpec& b) {
    const auto fr = block_ops::spectral(b, x.block(k), k);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(b.dim());
    for (Eigen::Index i = 0; i < fr.eigenvalues.size(); ++i)
      s += f(k, fr.eigenvalues(i)) * fr.idempotents[static_cast<std::size_t>(i)];
    return s;
  });
}

}  // namespace detail

inline constexpr double kTolSingular = 1e-12;
inline constexpr double kTolInterior = 1e-10;

/// det x as the product of all eigenvalues.
inline double det(const Element& x) { return eigenvalues(x).prod(); }

/// Sum of log-eigenvalues of an interior element; throws on non-interior.
inline double log_det(const Element& x) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.spec().num_blocks(); ++k) {
    const Eigen::VectorXd ev = block_ops::eigenvalues(x.spec().block(k), x.block(k), k);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (!(ev(i) > 0.0)) throw SingularityError("log_det of a non-interior element", k, ev(i));
      s += std::log(ev(i));
    }
  }
  return s;
}

inline Element inverse(const Element& x, double tol_singular = kTolSingular) {
  return detail::spectral_map(x, [&](std::size_t k, double l) {
    if (!(std::abs(l) > tol_singular)) throw SingularityError("inverse of a singular element", k, l);
    return 1.0 / l;
  });
}

inline Element sqrt(const Element& x, double tol = kTolSingular) {
  return detail::spectral_map(x, [&](std::size_t k, double l) {
    if (l < -tol) throw SingularityError("sqrt of an element outside the cone", k, l);
    return std::sqrt(std::max(l, 0.0));
  });
}

inline Element inv_sqrt(const Element& x, double tol_singular = kTolSingular) {
  return detail::spectral_map(x, [&](std::size_t k, double l) {
    if (!(l > tol_singular)) throw SingularityError("inv_sqrt of a non-interior element", k, l);
    return 1.0 / std::sqrt(l);
  });
}

enum class NormKind { two, one, inf, one_inf, inf_one };

inline double norm(const Element& x, NormKind kind = NormKind::two) {
  if (kind == NormKind::two) return std::sqrt(inner(x, x));
  double acc = 0.0;
  for (std::size_t k = 0; k < x.spec().num_blocks(); ++k) {
    const Eigen::VectorXd ev = block_ops::eigenvalues(x.spec().block(k), x.block(k), k).cwiseAbs();
    switch (kind) {
      case NormKind::one: acc += ev.sum(); break;
      case NormKind::inf: acc = std::max(acc, ev.maxCoeff()); break;
      case NormKind::one_inf: acc = std::max(acc, ev.sum()); break;
      case NormKind::inf_one: acc += ev.maxCoeff(); break;
      case NormKind::two: break;
    }
  }
  return acc;
}

/// ||x||_{1,inf} for x in K: max_k <x_k, e_k>, no eigensolves.
inline double one_inf_norm_in_cone(const Element& x) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.spec().num_blocks(); ++k) best = std::max(best, block_trace(x, k));
  return best;
}

/// Q_w(x), block by block.
inline Element quad_apply(const Element& w, const Element& x) {
  detail::require_conform(w, x);
  return detail::blockwise(x, [&](std::size_t k, const BlockSpec& b) {
    return block_ops::quad(b, w.block(k), x.block(k));
  });
}

/// Matrix of Q_{scale * w^{-1/2}} on the coordinates of a single-block element.
inline Eigen::MatrixXd quad_matrix(const Element& w_block, double scale) {
  if (w_block.spec().num_blocks() != 1) throw StructuralError("quad_matrix expects a single-block element");
  const BlockSpec& b = w_block.spec().block(0);
  const Element u = inv_sqrt(w_block) * scale;
  const int d = b.dim();
  Eigen::MatrixXd m(d, d);
  for (int j = 0; j < d; ++j) m.col(j) = block_ops::quad(b, u.coords(), Eigen::VectorXd::Unit(d, j));
  return m;
}

/// lambda_min(x) > tol * max(1, ||x||_inf).
inline bool is_interior(const Element& x, double tol = kTolInterior) {
  const Eigen::VectorXd ev = eigenvalues(x);
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  return ev.minCoeff() > tol * scale;
}

}  // namespace chubanov

#endif  // CHUBANOV_ALGEBRA_HPP
