#pragma once

#include "distlab/fixed_horizon.hpp"
#include "distlab/geometry.hpp"

namespace distlab {
namespace reference {

/// Discounted policy-evaluation instance with scalar rewards.
struct DiscountedInstance {
  FiniteMdp mdp;
  Policy policy;
  ScalarSupport support;
  Vector uniform_law;
};

/// 3-state, 2-action instance with gamma = 0.5 and a 5-atom grid on [0, 2].
DiscountedInstance three_state();

/// 2-state single-action chain [[0.9, 0.1], [0.2, 0.8]], gamma = 0.5.
DiscountedInstance two_state_chain();

/// Degenerate one-state instance: reward r, discount gamma, given grid.
DiscountedInstance one_state(double r, double gamma, const Vector& grid);

/// Episodic fixed-horizon instance.
struct EpisodicInstance {
  FiniteMdp mdp;
  Policy policy;
  int horizon = 1;
  Vector nu0;
  double lambda = 0.5;
  HorizonGeometry geometry;  // layer-h grids {0, 1, ..., h}: all reachable sums
};

/// 2-state, H = 3 instance with integer rewards {0, 1} and exact layer grids.
EpisodicInstance two_state_h3();

/// 2-state, 2-action instance with q = 2 rewards and 4-atom planar supports.
struct VectorInstance {
  FiniteMdp mdp;
  Policy policy;
  MultiSupport support;
  Vector uniform_law;
};
VectorInstance two_state_vector(double kernel_c = 1.0);

/// Random small instance for randomized audits: 2-4 states, 1-2 actions,
/// rewards from a small value set, irreducible chain, gamma in [0.3, 0.7].
DiscountedInstance random_discounted(RandomStream& rng);

}  // namespace reference
}  // namespace distlab
