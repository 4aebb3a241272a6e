#pragma once

#include <utility>
#include <vector>

#include "distlab/mdp.hpp"
#include "distlab/types.hpp"

namespace distlab {

/// Energy kernel kappa(x, y) = (|x|^c + |y|^c - |x - y|^c) / 2 with
/// homogeneity exponent c in (0, 2); the canonical c-homogeneous kernel of
/// strong negative type.
struct EnergyKernel {
  double c = 1.0;

  double operator()(const Eigen::Ref<const Vector>& x,
                    const Eigen::Ref<const Vector>& y) const {
    return 0.5 * (std::pow(x.norm(), c) + std::pow(y.norm(), c) -
                  std::pow((x - y).norm(), c));
  }
};

/// Cached spectral data of one statewise Gram matrix.
struct GramData {
  Matrix kernel_matrix;  // K
  Matrix root;           // K^{1/2}
  Matrix pinv_root;      // (K^dagger)^{1/2}
  Matrix slice_basis;    // orthonormal basis of K^{1/2}{v : 1'v = 0}
  Vector anchor;         // K^{1/2} applied to the uniform weight vector
  Matrix unembed_pinv;   // pseudo-inverse of [K^{1/2}; 1'], d x (d+1)
  double cutoff = 0.0;   // eigenvalue truncation threshold used
  Index rank = 0;
};

/// Eigendecomposition of the Gram matrix with relative cutoff 1e-10.
/// Throws IndefiniteKernel when an eigenvalue falls below -1e-8 * scale.
GramData gram_factorize(const Matrix& points, const EnergyKernel& kernel);

/// Per-state multivariate supports with cached Gram data.
struct MultiSupport {
  std::vector<Matrix> atoms;  // atoms[s] is d x q, one atom per row
  EnergyKernel kernel;
  std::vector<GramData> gram;

  Index n_states() const { return static_cast<Index>(atoms.size()); }
  Index dim(Index s) const { return atoms[s].rows(); }
  Index point_dim() const { return atoms.empty() ? 0 : atoms[0].cols(); }

  void build_gram();  // factorizes every state; called after filling atoms

  /// Lifts a scalar support to one-dimensional points (used by the
  /// cross-geometry checks).
  static MultiSupport from_scalar(const std::vector<Vector>& scalar_atoms, double c);
};

/// MMD between two unit-mass signed weight vectors on the same support:
/// sqrt((p - q)' K (p - q)), floored at zero against -1e-14 roundoff.
double mmd_distance(const Vector& p, const Vector& q, const GramData& gram);

/// Gram-root embedding K^{1/2} p and its least-squares inverse on the
/// retained eigenspace. Rank-deficient unembedding resolves to the
/// minimum-Euclidean-norm weights with unit total mass.
Vector embed_mtd(const Vector& p, const GramData& gram);
Vector unembed_mtd(const Vector& block, const GramData& gram);

/// Signed-categorical projection: kernel cross-moments b, lifted point
/// zeta = pinv_root * b, Euclidean projection onto the embedded unit-mass
/// affine slice, then the minimum-norm realizing weights.
Vector project_signed(const Matrix& points, const Vector& masses, const MultiSupport& support,
                      Index s);

Vector sampled_target_mtd(const BlockField& iterate, Index s, const Vector& r, Index s_next,
                          double gamma, const MultiSupport& support);

WeightField projected_bellman_mtd(const WeightField& eta, const FiniteMdp& mdp,
                                  const Policy& policy, const MultiSupport& support);

std::pair<WeightField, int> fixed_point_mtd(const FiniteMdp& mdp, const Policy& policy,
                                            const MultiSupport& support, double tol);

double sup_mmd(const WeightField& a, const WeightField& b, const MultiSupport& support);

WeightField uniform_field(const MultiSupport& support);
BlockField embed_field_mtd(const WeightField& eta, const MultiSupport& support);
WeightField unembed_field_mtd(const BlockField& blocks, const MultiSupport& support);

}  // namespace distlab
