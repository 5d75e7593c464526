#ifndef CHUBANOV_RESCALE_HPP
#define CHUBANOV_RESCALE_HPP

// Volumetric rescaling: step ratios rho_k, the shift beta_k, the half-space
// normal w_k and the log-volume change of one block automorphism.

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "chubanov/algebra.hpp"
#include "chubanov/errors.hpp"

namespace chubanov {

/// rho_k = ||y_k||_1 / (r_k ||z|| sqrt(l)), z = P y, for y in K.
inline double rho_for_block(const Element& y, const Element& z, std::size_t k) {
  const double z_norm = norm(z);
  if (!(z_norm > 0.0)) throw DomainError("rho_for_block: P y = 0, a dual certificate should have been emitted");
  const ConeSpec& spec = y.spec();
  const double l = static_cast<double>(spec.num_blocks());
  return block_trace(y, k) / (spec.block_rank(k) * z_norm * std::sqrt(l));
}

/// z_rho = 1/rho - 1/sqrt(rho (3 rho - 2)), the gap r_k - beta_k.
inline double z_rho(double rho) {
  if (!(rho > 1.0)) throw DomainError("z_rho requires rho > 1");
  return 1.0 / rho - 1.0 / std::sqrt(rho * (3.0 * rho - 2.0));
}

inline double beta_from_rho(double rho, int r_k) { return r_k - z_rho(rho); }

/// phi(rho) = 2 - 1/rho - sqrt(3 - 2/rho); exp(-phi(rho))^{d/r} bounds the volume ratio.
inline double phi(double rho) {
  if (!(rho >= 1.0)) throw DomainError("phi requires rho >= 1");
  return 2.0 - 1.0 / rho - std::sqrt(3.0 - 2.0 / rho);
}

/// w_k = ((r_k - beta) / <y_k, e_k>) rho_k r_k y_k + beta e_k on a single-block element.
inline Element build_w(const Element& y_block, double rho, int r_k) {
  if (y_block.spec().num_blocks() != 1) throw StructuralError("build_w expects a single-block element");
  const double tr = trace(y_block);
  if (!(tr > 0.0)) throw DomainError("build_w: <y_k, e_k> must be positive");
  const double beta = beta_from_rho(rho, r_k);
  return ((r_k - beta) / tr * rho * r_k) * y_block + beta * Element::identity(y_block.spec_ptr());
}

/// log r_k - (1/r_k) log det w_k, computed as a sum of log-eigenvalues.
inline double volume_delta(const Element& w_block) {
  if (w_block.spec().num_blocks() != 1) throw StructuralError("volume_delta expects a single-block element");
  const int r_k = w_block.spec().rank();
  return std::log(static_cast<double>(r_k)) - log_det(w_block) / r_k;
}

/// Same quantity from stored eigenvalues of w_k.
inline double volume_delta_from_eigenvalues(const Eigen::VectorXd& w_eigenvalues) {
  const int r_k = static_cast<int>(w_eigenvalues.size());
  double s = 0.0;
  for (Eigen::Index i = 0; i < w_eigenvalues.size(); ++i) {
    if (!(w_eigenvalues(i) > 0.0)) throw SingularityError("volume_delta of a non-interior w", 0, w_eigenvalues(i));
    s += std::log(w_eigenvalues(i));
  }
  return std::log(static_cast<double>(r_k)) - s / r_k;
}

/// Matrix of Q_{w_k^{-1/2} sqrt(r_k)} on block coordinates.
inline Eigen::MatrixXd block_scaling(const Element& w_block, int r_k) {
  return quad_matrix(w_block, std::sqrt(static_cast<double>(r_k)));
}

/// Per-block rescaling choice after a Basic Procedure threshold exit.
struct BlockDecision {
  double rho = 0.0;
  bool applied = false;
  Element w;                     // when applied
  Eigen::VectorXd w_eigenvalues;  // when applied
  double log_volume_delta = 0.0;  // when applied
};

struct RescaleDecision {
  std::vector<BlockDecision> blocks;

  bool any_applied() const {
    for (const auto& b : blocks)
      if (b.applied) return true;
    return false;
  }
};

/// Evaluates every block; blocks with rho_k > 1 get w_k and their volume delta.
inline RescaleDecision decide_rescale(const Element& y, const Element& z) {
  RescaleDecision out;
  const ConeSpec& spec = y.spec();
  for (std::size_t k = 0; k < spec.num_blocks(); ++k) {
    BlockDecision bd;
    bd.rho = rho_for_block(y, z, k);
    if (bd.rho > 1.0) {
      bd.applied = true;
      bd.w = build_w(y.block_element(k), bd.rho, spec.block_rank(k));
      bd.w_eigenvalues = eigenvalues(bd.w);
      bd.log_volume_delta = volume_delta_from_eigenvalues(bd.w_eigenvalues);
    }
    out.blocks.push_back(std::move(bd));
  }
  return out;
}

}  // namespace chubanov

#endif  // CHUBANOV_RESCALE_HPP
