#pragma once

#include <span>
#include <utility>
#include <vector>

#include "distlab/mdp.hpp"
#include "distlab/types.hpp"

namespace distlab {

/// Per-state ordered scalar supports Theta(s) = {theta_1(s) < ... < theta_d(s)}.
/// d = 1 is allowed (used by the horizon-0 layer, whose support is {0}).
struct ScalarSupport {
  std::vector<Vector> atoms;

  Index n_states() const { return static_cast<Index>(atoms.size()); }
  Index dim(Index s) const { return atoms[s].size(); }
  double gap(Index s, Index j) const { return atoms[s][j + 1] - atoms[s][j]; }
  double range(Index s) const { return atoms[s][atoms[s].size() - 1] - atoms[s][0]; }

  void validate() const;

  /// Uniform grid with `count` atoms spanning [lo, hi] shared by all states.
  static ScalarSupport uniform(Index n_states, double lo, double hi, Index count);
};

/// Cramer distance between two weight vectors on the same statewise grid:
/// sqrt of sum_j gap_j (c_j^mu - c_j^nu)^2 over the cumulative masses.
double cramer_distance(const Vector& mu, const Vector& nu, const ScalarSupport& support,
                       Index s);

/// Cumulative-mass embedding (sqrt(gap_1) c_1, ..., sqrt(gap_{d-1}) c_{d-1}, 0)
/// and its inverse. Unembedding rejects blocks whose recovered cumulative
/// masses fail monotonicity or leave [0, 1] beyond 1e-9.
Vector embed_ctd(const Vector& weights, const ScalarSupport& support, Index s);
Vector unembed_ctd(const Vector& block, const ScalarSupport& support, Index s);

/// Linear-interpolation projection of an atomic law onto the grid at state s.
/// Atoms below the first grid node clip to it, atoms above the last clip to
/// the last; an atom exactly on a node keeps all its mass there.
Vector project_categorical(std::span<const double> locations, std::span<const double> masses,
                           const ScalarSupport& support, Index s);

/// Accumulating core used by the hot paths; adds the projected masses to
/// `out` (size d, caller-zeroed).
void project_categorical_into(const Vector& grid, double location, double mass, Vector& out);

/// One-sample target: unembed the next-state block, push atoms through
/// z -> r + gamma z, project onto Theta(s), re-embed at s.
Vector sampled_target_ctd(const BlockField& iterate, Index s, double r, Index s_next,
                          double gamma, const ScalarSupport& support);

/// Exact projected distributional Bellman operator on weight fields.
WeightField projected_bellman_ctd(const WeightField& eta, const FiniteMdp& mdp,
                                  const Policy& policy, const ScalarSupport& support);

/// Fixed point of the projected operator from the uniform field; stops when
/// the sup-Cramer sweep change is at most tol * (1 - sqrt(gamma)).
std::pair<WeightField, int> fixed_point_ctd(const FiniteMdp& mdp, const Policy& policy,
                                            const ScalarSupport& support, double tol);

double sup_cramer(const WeightField& a, const WeightField& b, const ScalarSupport& support);

WeightField uniform_field(const ScalarSupport& support);
BlockField embed_field_ctd(const WeightField& eta, const ScalarSupport& support);
WeightField unembed_field_ctd(const BlockField& blocks, const ScalarSupport& support);

}  // namespace distlab
