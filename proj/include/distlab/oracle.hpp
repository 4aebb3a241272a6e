#pragma once

#include <cstdint>
#include <vector>

#include "distlab/fixed_horizon.hpp"
#include "distlab/geometry.hpp"

namespace distlab {
namespace oracle {

/// Finite atomic law: one point per row, masses summing to 1 (signed masses
/// appear only inside projection oracles).
struct AtomicLaw {
  Matrix points;  // n x q
  Vector masses;

  Index size() const { return masses.size(); }
  Index point_dim() const { return points.cols(); }

  static AtomicLaw delta(const Vector& point);
  static AtomicLaw delta_scalar(double point);
};

/// Lexicographic sort with exact merge of equal locations.
AtomicLaw merge_atoms(const AtomicLaw& law);

/// Pushforward z -> shift + scale * z.
AtomicLaw pushforward(const AtomicLaw& law, const Vector& shift, double scale);

/// Mixture with the given weights; atoms merged exactly.
AtomicLaw mixture(const std::vector<AtomicLaw>& laws, const Vector& weights);

/// Exact scalar Cramer distance between two atomic laws (integral of the
/// squared CDF gap over the union of breakpoints).
double cramer_atomic(const AtomicLaw& a, const AtomicLaw& b);

/// MMD between two atomic laws under the energy kernel.
double mmd_atomic(const AtomicLaw& a, const AtomicLaw& b, const EnergyKernel& kernel);

/// Exact h-step return laws for h = 0..H by dynamic programming over the
/// finitely many reward values. result[h][s]; layer 0 is the point mass at
/// the origin. Throws AtomBudgetExceeded above `atom_budget` atoms per law.
std::vector<std::vector<AtomicLaw>> exact_return_distribution_fh(
    const FiniteMdp& mdp, const Policy& policy, int horizon,
    std::int64_t atom_budget = 1000000);

/// Fine-grid approximation of the discounted scalar return laws with a
/// certified sup-Cramer error bound:
///   certified_error = step_error / (1 - sqrt(gamma)) + iteration tail,
/// where step_error is the exact Cramer projection error of the final
/// operator application and the tail covers the remaining iteration gap.
/// sq_step_bound = gap / 4 is the a priori bound on the squared projection
/// error of one application; it is linear in the grid gap.
struct FineGridResult {
  ScalarSupport grid;
  WeightField weights;             // approximate fixed point on the grid
  std::vector<AtomicLaw> laws;     // the same laws in atomic form
  double gap = 0.0;                // grid spacing
  double step_error = 0.0;         // exact Cramer error of the last projection
  double sq_step_bound = 0.0;      // gap / 4
  double iter_tail = 0.0;
  double certified_error = 0.0;
  int iterations = 0;
};
FineGridResult fine_grid_oracle_discounted(const FiniteMdp& mdp, const Policy& policy,
                                           double resolution, double tol);

/// Representation-error decomposition report for one experiment.
struct ReprReport {
  double eps_repr = 0.0;           // sup-metric distance between Pi eta^pi and eta^pi
  double bound = 0.0;              // eps_repr / (1 - beta)
  double lhs = 0.0;                // sup-metric distance between eta* and eta^pi
  double oracle_slack = 0.0;       // certified error of the oracle laws
  bool inequality_holds = false;   // lhs <= bound + oracle_slack
  std::vector<double> per_state_eps;
};

/// Discounted decomposition: oracle laws per state against the projected
/// fixed point of the given geometry (scalar laws; q = 1).
ReprReport representation_error(const std::vector<AtomicLaw>& eta_pi, const Geometry& geometry,
                                const WeightField& eta_star, double beta,
                                double oracle_slack);

/// Fixed-horizon decomposition in the weighted stack metric; the oracle laws
/// are exact so the slack is zero.
ReprReport representation_error_fh(const std::vector<std::vector<AtomicLaw>>& eta_pi,
                                   const HorizonGeometry& geometry, const HorizonField& eta_star,
                                   double lambda);

/// Dense grid search for the metric projection of an atomic law onto the
/// state-s support: over the probability simplex for the scalar geometry,
/// over the box [-2, 3]^d slice of the unit-mass plane for the signed one.
/// Throws OracleScaleExceeded for supports with more than 4 atoms.
Vector brute_force_projection_oracle(const Matrix& points, const Vector& masses,
                                     const Geometry& geometry, Index s, double resolution);

}  // namespace oracle
}  // namespace distlab
