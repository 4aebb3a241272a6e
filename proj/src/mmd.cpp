#include "distlab/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace distlab {

namespace {
constexpr int kMaxSweeps = 1000000;
}  // namespace

GramData gram_factorize(const Matrix& points, const EnergyKernel& kernel) {
  const Index d = points.rows();
  if (d < 1) throw EmptySupport("gram_factorize needs at least one atom");

  GramData data;
  data.kernel_matrix.resize(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j) {
      const double v = kernel(points.row(i).transpose(), points.row(j).transpose());
      data.kernel_matrix(i, j) = v;
      data.kernel_matrix(j, i) = v;
    }

  Eigen::SelfAdjointEigenSolver<Matrix> es(data.kernel_matrix);
  const Vector& evals = es.eigenvalues();
  const Matrix& evecs = es.eigenvectors();
  const double scale = std::max(evals.cwiseAbs().maxCoeff(), 1.0);
  if (evals.minCoeff() < -1e-8 * scale)
    throw IndefiniteKernel("smallest Gram eigenvalue " + std::to_string(evals.minCoeff()));

  data.cutoff = 1e-10 * scale;
  Vector sqrt_vals = Vector::Zero(d);
  Vector inv_sqrt_vals = Vector::Zero(d);
  data.rank = 0;
  for (Index i = 0; i < d; ++i) {
    if (evals[i] > data.cutoff) {
      sqrt_vals[i] = std::sqrt(evals[i]);
      inv_sqrt_vals[i] = 1.0 / sqrt_vals[i];
      ++data.rank;
    }
  }
  data.root = evecs * sqrt_vals.asDiagonal() * evecs.transpose();
  data.pinv_root = evecs * inv_sqrt_vals.asDiagonal() * evecs.transpose();

  // Anchor and direction basis of the embedded unit-mass slice
  // A = {K^{1/2} p : 1'p = 1} = anchor + K^{1/2}(1-orthogonal directions).
  data.anchor = data.root * Vector::Constant(d, 1.0 / static_cast<double>(d));
  if (d > 1) {
    const Matrix ones_complement =
        Eigen::HouseholderQR<Matrix>(Matrix::Ones(d, 1)).householderQ();
    const Matrix directions = data.root * ones_complement.rightCols(d - 1);
    Eigen::ColPivHouseholderQR<Matrix> qr(directions);
    qr.setThreshold(1e-12);
    const Index rank_d = qr.rank();
    if (rank_d > 0) {
      Matrix q = qr.householderQ();
      data.slice_basis = q.leftCols(rank_d);
    } else {
      data.slice_basis.resize(d, 0);
    }
  } else {
    data.slice_basis.resize(d, 0);
  }

  Matrix stacked(d + 1, d);
  stacked.topRows(d) = data.root;
  stacked.row(d).setOnes();
  data.unembed_pinv = stacked.completeOrthogonalDecomposition().pseudoInverse();
  return data;
}

void MultiSupport::build_gram() {
  gram.clear();
  gram.reserve(atoms.size());
  for (const Matrix& pts : atoms) gram.push_back(gram_factorize(pts, kernel));
}

MultiSupport MultiSupport::from_scalar(const std::vector<Vector>& scalar_atoms, double c) {
  MultiSupport support;
  support.kernel.c = c;
  support.atoms.reserve(scalar_atoms.size());
  for (const Vector& a : scalar_atoms) {
    Matrix pts(a.size(), 1);
    pts.col(0) = a;
    support.atoms.push_back(std::move(pts));
  }
  support.build_gram();
  return support;
}

double mmd_distance(const Vector& p, const Vector& q, const GramData& gram) {
  if (p.size() != gram.kernel_matrix.rows() || q.size() != gram.kernel_matrix.rows())
    throw DimensionMismatch("mmd_distance weight size");
  const Vector diff = p - q;
  const double sq = diff.dot(gram.kernel_matrix * diff);
  return std::sqrt(std::max(sq, 0.0));
}

Vector embed_mtd(const Vector& p, const GramData& gram) {
  if (p.size() != gram.root.rows()) throw DimensionMismatch("embed_mtd weight size");
  return gram.root * p;
}

Vector unembed_mtd(const Vector& block, const GramData& gram) {
  const Index d = gram.root.rows();
  if (block.size() != d) throw DimensionMismatch("unembed_mtd block size");
  Vector rhs(d + 1);
  rhs.head(d) = block;
  rhs[d] = 1.0;
  return gram.unembed_pinv * rhs;
}

Vector project_signed(const Matrix& points, const Vector& masses, const MultiSupport& support,
                      Index s) {
  if (support.dim(s) < 1) throw EmptySupport("state " + std::to_string(s));
  const GramData& gram = support.gram[s];
  const Matrix& grid = support.atoms[s];
  const Index d = grid.rows();

  Vector b = Vector::Zero(d);
  for (Index j = 0; j < points.rows(); ++j) {
    if (masses[j] == 0.0) continue;
    for (Index i = 0; i < d; ++i)
      b[i] += masses[j] *
              support.kernel(grid.row(i).transpose(), points.row(j).transpose());
  }

  const Vector zeta = gram.pinv_root * b;
  Vector projected = gram.anchor;
  if (gram.slice_basis.cols() > 0)
    projected += gram.slice_basis *
                 (gram.slice_basis.transpose() * (zeta - gram.anchor));
  return unembed_mtd(projected, gram);
}

Vector sampled_target_mtd(const BlockField& iterate, Index s, const Vector& r, Index s_next,
                          double gamma, const MultiSupport& support) {
  const Vector weights = unembed_mtd(iterate[s_next], support.gram[s_next]);
  const Matrix pushed =
      (gamma * support.atoms[s_next]).rowwise() + r.transpose();
  const Vector projected = project_signed(pushed, weights, support, s);
  return embed_mtd(projected, support.gram[s]);
}

WeightField projected_bellman_mtd(const WeightField& eta, const FiniteMdp& mdp,
                                  const Policy& policy, const MultiSupport& support) {
  const double gamma = mdp.discount.value();
  WeightField out(eta.size());
  for (Index s = 0; s < mdp.n_states; ++s) {
    // The statewise projection is affine in the target measure, so projecting
    // the full mixture in one pass is exact.
    std::vector<Matrix> point_groups;
    std::vector<Vector> mass_groups;
    Index n_atoms = 0;
    for (Index a = 0; a < mdp.n_actions; ++a) {
      const double pa = policy.probs(s, a);
      if (pa == 0.0) continue;
      const Vector r = mdp.reward_at(s, a).transpose();
      for (Index sn = 0; sn < mdp.n_states; ++sn) {
        const double w = pa * mdp.transition[a](s, sn);
        if (w == 0.0) continue;
        point_groups.push_back((gamma * support.atoms[sn]).rowwise() + r.transpose());
        mass_groups.push_back(w * eta[sn]);
        n_atoms += support.dim(sn);
      }
    }
    Matrix points(n_atoms, support.point_dim());
    Vector masses(n_atoms);
    Index offset = 0;
    for (std::size_t g = 0; g < point_groups.size(); ++g) {
      const Index rows = point_groups[g].rows();
      points.middleRows(offset, rows) = point_groups[g];
      masses.segment(offset, rows) = mass_groups[g];
      offset += rows;
    }
    out[s] = project_signed(points, masses, support, s);
  }
  return out;
}

double sup_mmd(const WeightField& a, const WeightField& b, const MultiSupport& support) {
  double worst = 0.0;
  for (Index s = 0; s < support.n_states(); ++s)
    worst = std::max(worst, mmd_distance(a[s], b[s], support.gram[s]));
  return worst;
}

WeightField uniform_field(const MultiSupport& support) {
  WeightField eta(support.atoms.size());
  for (Index s = 0; s < support.n_states(); ++s)
    eta[s] = Vector::Constant(support.dim(s), 1.0 / static_cast<double>(support.dim(s)));
  return eta;
}

BlockField embed_field_mtd(const WeightField& eta, const MultiSupport& support) {
  BlockField blocks(eta.size());
  for (Index s = 0; s < support.n_states(); ++s)
    blocks[s] = embed_mtd(eta[s], support.gram[s]);
  return blocks;
}

WeightField unembed_field_mtd(const BlockField& blocks, const MultiSupport& support) {
  WeightField eta(blocks.size());
  for (Index s = 0; s < support.n_states(); ++s)
    eta[s] = unembed_mtd(blocks[s], support.gram[s]);
  return eta;
}

std::pair<WeightField, int> fixed_point_mtd(const FiniteMdp& mdp, const Policy& policy,
                                            const MultiSupport& support, double tol) {
  const double beta = std::pow(mdp.discount.value(), support.kernel.c / 2.0);
  WeightField eta = uniform_field(support);
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    WeightField next = projected_bellman_mtd(eta, mdp, policy, support);
    const double change = sup_mmd(next, eta, support);
    eta = std::move(next);
    if (change <= tol * (1.0 - beta)) return {std::move(eta), sweep};
  }
  throw ConvergenceFailure("projected operator iteration exceeded sweep cap");
}

}  // namespace distlab
