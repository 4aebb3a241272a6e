#pragma once

#include <vector>

#include "distlab/mdp.hpp"
#include "distlab/types.hpp"

namespace distlab {

/// Stationary distribution of an irreducible aperiodic chain, solved from
/// mu P = mu with the normalization row replacing one equation.
/// Throws NotIrreducible / NotAperiodic when the structural chain fails the
/// preconditions (zero entries are structural: tolerance exactly 0).
Vector stationary_distribution(const Matrix& chain);
Vector stationary_distribution(const FiniteMdp& mdp, const Policy& policy);

/// Geometric-mixing envelope fitted from exact matrix powers.
///
/// tv_curve[k] is the worst-start total-variation distance to stationarity
/// after k steps, k = 0..k_max. sigma_mix is the second-largest eigenvalue
/// modulus plus a 1e-9 safety margin; c_mix is the smallest constant (floored
/// at 1) making tv_curve[k] <= c_mix * sigma_mix^k on the tabulated range.
struct MixingProfile {
  double c_mix = 1.0;
  double sigma_mix = 0.0;
  std::vector<double> tv_curve;
  Vector stationary;
  double mu_min = 0.0;

  /// First k with sup-TV <= delta; extrapolates through the fitted envelope
  /// beyond the tabulated range.
  std::int64_t t_delta(double delta) const;
};

MixingProfile mixing_profile(const Matrix& chain, int k_max);
MixingProfile mixing_profile(const FiniteMdp& mdp, const Policy& policy, int k_max);

/// Within-episode phase distributions rho_t = nu0 (P^pi)^t for t = 0..H-1.
struct PhaseProfile {
  Matrix rho;  // H x n_states, row t = rho_t
  double rho_min = 0.0;
  bool full_support = false;
};

PhaseProfile phase_profile(const Matrix& chain, const Vector& nu0, int horizon);
PhaseProfile phase_profile(const FiniteMdp& mdp, const Policy& policy, const Vector& nu0,
                           int horizon);

/// Structural reachability checks used by the chain preconditions.
bool is_irreducible(const Matrix& chain);
int chain_period(const Matrix& chain);  // defined for irreducible chains
int count_recurrent_classes(const Matrix& chain);

}  // namespace distlab
