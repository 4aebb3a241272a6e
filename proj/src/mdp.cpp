#include "distlab/mdp.hpp"

#include <cmath>
#include <string>

namespace distlab {

namespace {

std::string row_name(Index s, Index a) {
  return "(s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
}

}  // namespace

void FiniteMdp::validate() const {
  if (n_states <= 0) throw ConfigError("states must be positive");
  if (n_actions <= 0) throw ConfigError("actions must be positive");
  if (reward_dim <= 0) throw ConfigError("reward_dim must be positive");
  if (static_cast<Index>(transition.size()) != n_actions)
    throw ConfigError("transition must hold one matrix per action");
  for (Index a = 0; a < n_actions; ++a) {
    const Matrix& P = transition[a];
    if (P.rows() != n_states || P.cols() != n_states)
      throw ConfigError("transition matrix for action " + std::to_string(a) +
                        " has wrong shape");
    for (Index s = 0; s < n_states; ++s) {
      if ((P.row(s).array() < 0.0).any())
        throw ConfigError("transition row " + row_name(s, a) + " has a negative entry");
      const double sum = P.row(s).sum();
      if (std::abs(sum - 1.0) > kRowSumTol)
        throw ConfigError("transition row " + row_name(s, a) + " sums to " +
                          std::to_string(sum));
    }
  }
  if (reward.rows() != n_states * n_actions || reward.cols() != reward_dim)
    throw ConfigError("reward must have states*actions rows and reward_dim columns");
  for (Index s = 0; s < n_states; ++s) {
    for (Index a = 0; a < n_actions; ++a) {
      const auto r = reward_at(s, a);
      if ((r.array() < 0.0).any() || (r.array() > 1.0).any())
        throw ConfigError("reward " + row_name(s, a) + " leaves the unit cube");
    }
  }
  if (discount && (*discount <= 0.0 || *discount >= 1.0))
    throw ConfigError("discount must lie in (0,1)");
}

void Policy::validate(const FiniteMdp& mdp) const {
  if (probs.rows() != mdp.n_states || probs.cols() != mdp.n_actions)
    throw ConfigError("policy must be states x actions");
  for (Index s = 0; s < probs.rows(); ++s) {
    if ((probs.row(s).array() < 0.0).any())
      throw ConfigError("policy row s=" + std::to_string(s) + " has a negative entry");
    const double sum = probs.row(s).sum();
    if (std::abs(sum - 1.0) > kRowSumTol)
      throw ConfigError("policy row s=" + std::to_string(s) + " sums to " +
                        std::to_string(sum));
  }
}

Matrix policy_transition(const FiniteMdp& mdp, const Policy& policy) {
  Matrix chain = Matrix::Zero(mdp.n_states, mdp.n_states);
  for (Index a = 0; a < mdp.n_actions; ++a)
    chain += policy.probs.col(a).asDiagonal() * mdp.transition[a];
  return chain;
}

Transition sample_transition(const FiniteMdp& mdp, const Policy& policy, Index s,
                             RandomStream& rng) {
  Transition t;
  t.action = rng.categorical(policy.probs.row(s).transpose());
  t.next_state = rng.categorical(mdp.transition[t.action].row(s).transpose());
  t.reward = mdp.reward_at(s, t.action).transpose();
  return t;
}

}  // namespace distlab
