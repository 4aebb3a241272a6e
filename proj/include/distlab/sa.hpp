#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "distlab/geometry.hpp"
#include "distlab/mdp.hpp"

namespace distlab {

// Step-size laws of the three regimes.
struct ConstantStep {
  double alpha;
};
struct LinearStep {
  double alpha;
  double offset;  // h >= 1
};
struct PolyStep {
  double alpha;
  double offset;  // h >= 1
  double exponent;  // z in (0, 1)
};
using StepSchedule = std::variant<ConstantStep, LinearStep, PolyStep>;

double step_size(const StepSchedule& schedule, std::int64_t k);
std::string schedule_label(const StepSchedule& schedule);

/// One asynchronous update: block s becomes (1 - alpha) U(s) + alpha target.
void async_update(BlockField& iterate, Index s, const Vector& target, double alpha);

/// Block-supremum and mixed block norms of an embedded iterate.
struct BlockNorms {
  double sup;    // max_s |U(s)|_2
  double mixed;  // (sum_s |U(s)|_2^p)^(1/p)
};
BlockNorms block_norms(const BlockField& iterate, double p);

/// Geometrically spaced checkpoints {0, 1, 2, 4, ..., n_steps}.
std::vector<std::int64_t> geometric_checkpoints(std::int64_t n_steps);

/// Replicated error trace of one experiment. sq_error(r, i) is the squared
/// sup-metric distance to the fixed point at checkpoint i in replication r.
struct RunTrace {
  std::vector<std::int64_t> checkpoints;
  Matrix sq_error;
  std::vector<std::uint64_t> seeds;
  // Episodic runs also report the per-boundary step-size masses.
  std::vector<double> bar_alpha;
  std::vector<double> bar_alpha2;

  Vector mean_curve() const;
  Vector stderr_curve() const;
};

struct DiscountedRunConfig {
  StepSchedule schedule;
  std::int64_t n_steps = 0;
  std::vector<std::int64_t> checkpoints;  // empty -> geometric
  int n_replications = 1;
  std::uint64_t base_seed = 0;
  double fixed_point_tol = 1e-11;
};

/// Asynchronous one-state runner for the discounted algorithms under IID or
/// Markov-trajectory sampling. The fixed point is computed up front; errors
/// are squared sup-metric distances to it.
RunTrace run_discounted(const Geometry& geometry, const FiniteMdp& mdp, const Policy& policy,
                        const SamplingRegime& regime, const DiscountedRunConfig& config,
                        const WeightField* initial_field = nullptr,
                        const WeightField* fixed_point_field = nullptr,
                        BlockField* final_blocks_out = nullptr);

}  // namespace distlab
