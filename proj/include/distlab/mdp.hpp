#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "distlab/errors.hpp"
#include "distlab/types.hpp"

namespace distlab {

inline constexpr double kRowSumTol = 1e-12;

/// Finite MDP with deterministic per-(state, action) rewards in the unit cube.
/// `discount` is present exactly when the instance is used in discounted mode.
struct FiniteMdp {
  Index n_states = 0;
  Index n_actions = 0;
  Index reward_dim = 1;
  std::vector<Matrix> transition;  // transition[a](s, s') = P(s' | s, a)
  Matrix reward;                   // row s * n_actions + a, reward_dim columns
  std::optional<double> discount;

  Eigen::Ref<const Eigen::RowVectorXd> reward_at(Index s, Index a) const {
    return reward.row(s * n_actions + a);
  }

  /// Throws ConfigError naming the offending row on any invariant violation.
  void validate() const;
};

struct Policy {
  Matrix probs;  // probs(s, a) = pi(a | s)

  void validate(const FiniteMdp& mdp) const;
};

/// Policy-induced state chain P^pi(s, s') = sum_a pi(a|s) P(s'|s, a).
Matrix policy_transition(const FiniteMdp& mdp, const Policy& policy);

struct Transition {
  Index action = 0;
  Vector reward;
  Index next_state = 0;
};

/// Draws a ~ pi(.|s), s' ~ P(.|s,a) and reads off r = R(s, a).
Transition sample_transition(const FiniteMdp& mdp, const Policy& policy, Index s,
                             RandomStream& rng);

// Sampling models for the runners.
struct IidRegime {
  Vector law;  // state law rho, must have full support for the runners
};
struct MarkovRegime {
  std::variant<Index, Vector> init;  // initial state or initial law
};
struct EpisodicRegime {
  Vector reset_law;  // nu_0
  int horizon = 1;   // H
};
using SamplingRegime = std::variant<IidRegime, MarkovRegime, EpisodicRegime>;

}  // namespace distlab
