#pragma once

#include <cstdint>
#include <vector>

#include "distlab/chain.hpp"
#include "distlab/geometry.hpp"
#include "distlab/sa.hpp"

namespace distlab {

/// Horizon-indexed representation family: layers[h - 1] carries the supports
/// of horizon h for h = 1..H. The horizon-0 layer is implicit: the single
/// atom {0} whose embedded block is identically zero in both geometries.
struct HorizonGeometry {
  std::vector<Geometry> layers;

  int horizon() const { return static_cast<int>(layers.size()); }
  Index n_states() const { return geometry_states(layers.front()); }
};

/// Horizon-stacked embedded iterate: blocks[h - 1][s] for h = 1..H.
struct HorizonStack {
  std::vector<BlockField> blocks;
  double lambda = 0.5;  // horizon decay weight of the analysis metric
};

/// Horizon-stacked weight fields, same layout.
struct HorizonField {
  std::vector<WeightField> layers;
};

double weighted_sup_norm(const HorizonStack& stack);
double weighted_sup_distance(const HorizonStack& a, const HorizonStack& b);

/// Weighted stack metric max_{h,s} lambda^h * l(eta^h(s), eta'^h(s)).
double weighted_sup_metric(const HorizonGeometry& geometry, const HorizonField& a,
                           const HorizonField& b, double lambda);

HorizonStack embed_stack(const HorizonGeometry& geometry, const HorizonField& field,
                         double lambda);
HorizonField unembed_stack(const HorizonGeometry& geometry, const HorizonStack& stack);

/// Stacked one-sample target: for every horizon h the layer-(h-1) estimate at
/// the sampled next state is pushed by the shared first reward (gamma = 1)
/// and projected onto the layer-h support at s. Layer 0 is the point mass at
/// the origin.
std::vector<Vector> stacked_sampled_target(const HorizonGeometry& geometry,
                                           const HorizonStack& stack, Index s, const Vector& r,
                                           Index s_next);

/// Exact projected fixed point by one forward pass over horizons.
HorizonField fixed_point_fh(const HorizonGeometry& geometry, const FiniteMdp& mdp,
                            const Policy& policy);

/// One exact application of the projected fixed-horizon operator.
HorizonField projected_bellman_fh(const HorizonGeometry& geometry, const FiniteMdp& mdp,
                                  const Policy& policy, const HorizonField& eta);

struct EpisodicRunConfig {
  StepSchedule schedule;
  std::int64_t n_episodes = 0;
  std::vector<std::int64_t> checkpoints;  // boundary indices m; empty -> geometric
  int n_replications = 1;
  std::uint64_t base_seed = 0;
  double lambda = 0.5;
  // Optional within-episode diagnostics: squared errors at these raw step
  // indices k (no boundary alignment), recorded alongside the boundary trace.
  std::vector<std::int64_t> within_episode_steps;
};

struct EpisodicTrace {
  RunTrace boundary;                       // indexed by episode boundary m
  std::vector<std::int64_t> within_steps;  // diagnostics, optional
  Matrix within_sq_error;
};

/// Episodic runner: i.i.d. resets from nu0, fixed length H, every transition
/// updates the full horizon stack at the visited state. Refuses to run when
/// some phase distribution lacks full support.
EpisodicTrace run_episodic(const HorizonGeometry& geometry, const FiniteMdp& mdp,
                           const Policy& policy, const Vector& nu0,
                           const EpisodicRunConfig& config,
                           const HorizonField* initial_field = nullptr,
                           const HorizonField* fixed_point_field = nullptr);

}  // namespace distlab
