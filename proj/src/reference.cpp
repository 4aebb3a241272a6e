#include "distlab/reference.hpp"

namespace distlab {
namespace reference {

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Index>(rows.size());
  const auto c = static_cast<Index>(rows.begin()->size());
  Matrix m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vector from_list(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

DiscountedInstance three_state() {
  DiscountedInstance inst;
  inst.mdp.n_states = 3;
  inst.mdp.n_actions = 2;
  inst.mdp.reward_dim = 1;
  inst.mdp.discount = 0.5;
  inst.mdp.transition = {
      from_rows({{0.6, 0.3, 0.1}, {0.2, 0.5, 0.3}, {0.3, 0.3, 0.4}}),
      from_rows({{0.1, 0.6, 0.3}, {0.4, 0.2, 0.4}, {0.25, 0.5, 0.25}}),
  };
  inst.mdp.reward = from_rows({{1.0}, {0.5}, {0.25}, {0.75}, {0.0}, {1.0}});
  inst.policy.probs = from_rows({{0.7, 0.3}, {0.5, 0.5}, {0.4, 0.6}});
  inst.mdp.validate();
  inst.policy.validate(inst.mdp);
  inst.support = ScalarSupport::uniform(3, 0.0, 2.0, 5);
  inst.uniform_law = Vector::Constant(3, 1.0 / 3.0);
  return inst;
}

DiscountedInstance two_state_chain() {
  DiscountedInstance inst;
  inst.mdp.n_states = 2;
  inst.mdp.n_actions = 1;
  inst.mdp.reward_dim = 1;
  inst.mdp.discount = 0.5;
  inst.mdp.transition = {from_rows({{0.9, 0.1}, {0.2, 0.8}})};
  inst.mdp.reward = from_rows({{1.0}, {0.0}});
  inst.policy.probs = from_rows({{1.0}, {1.0}});
  inst.mdp.validate();
  inst.policy.validate(inst.mdp);
  inst.support = ScalarSupport::uniform(2, 0.0, 2.0, 5);
  inst.uniform_law = Vector::Constant(2, 0.5);
  return inst;
}

DiscountedInstance one_state(double r, double gamma, const Vector& grid) {
  DiscountedInstance inst;
  inst.mdp.n_states = 1;
  inst.mdp.n_actions = 1;
  inst.mdp.reward_dim = 1;
  inst.mdp.discount = gamma;
  inst.mdp.transition = {Matrix::Ones(1, 1)};
  inst.mdp.reward = Matrix::Constant(1, 1, r);
  inst.policy.probs = Matrix::Ones(1, 1);
  inst.mdp.validate();
  inst.policy.validate(inst.mdp);
  inst.support.atoms = {grid};
  inst.uniform_law = Vector::Ones(1);
  return inst;
}

EpisodicInstance two_state_h3() {
  EpisodicInstance inst;
  inst.mdp.n_states = 2;
  inst.mdp.n_actions = 1;
  inst.mdp.reward_dim = 1;
  inst.mdp.transition = {from_rows({{0.5, 0.5}, {0.6, 0.4}})};
  inst.mdp.reward = from_rows({{1.0}, {0.0}});
  inst.policy.probs = from_rows({{1.0}, {1.0}});
  inst.mdp.validate();
  inst.policy.validate(inst.mdp);
  inst.horizon = 3;
  inst.nu0 = from_list({0.5, 0.5});
  inst.lambda = 0.5;
  for (int h = 1; h <= inst.horizon; ++h) {
    ScalarSupport support = ScalarSupport::uniform(2, 0.0, static_cast<double>(h), h + 1);
    inst.geometry.layers.emplace_back(CramerGeometry{std::move(support)});
  }
  return inst;
}

VectorInstance two_state_vector(double kernel_c) {
  VectorInstance inst;
  inst.mdp.n_states = 2;
  inst.mdp.n_actions = 2;
  inst.mdp.reward_dim = 2;
  inst.mdp.discount = 0.5;
  inst.mdp.transition = {
      from_rows({{0.7, 0.3}, {0.4, 0.6}}),
      from_rows({{0.2, 0.8}, {0.5, 0.5}}),
  };
  inst.mdp.reward = from_rows({
      {1.0, 0.0},   // (s=0, a=0)
      {0.25, 0.5},  // (s=0, a=1)
      {0.0, 1.0},   // (s=1, a=0)
      {0.75, 0.25}  // (s=1, a=1)
  });
  inst.policy.probs = from_rows({{0.6, 0.4}, {0.3, 0.7}});
  inst.mdp.validate();
  inst.policy.validate(inst.mdp);
  inst.support.kernel.c = kernel_c;
  // Planar 4-atom grids covering the reachable return box [0, 2]^2.
  inst.support.atoms = {
      from_rows({{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}, {2.0, 2.0}}),
      from_rows({{0.0, 0.0}, {1.0, 0.5}, {0.5, 1.5}, {2.0, 2.0}}),
  };
  inst.support.build_gram();
  inst.uniform_law = Vector::Constant(2, 0.5);
  return inst;
}

DiscountedInstance random_discounted(RandomStream& rng) {
  DiscountedInstance inst;
  const Index n = 2 + static_cast<Index>(rng.uniform01() * 3.0);  // 2..4
  const Index actions = 1 + static_cast<Index>(rng.uniform01() * 2.0);
  inst.mdp.n_states = n;
  inst.mdp.n_actions = actions;
  inst.mdp.reward_dim = 1;
  inst.mdp.discount = 0.3 + 0.4 * rng.uniform01();
  inst.mdp.transition.assign(actions, Matrix::Zero(n, n));
  for (Index a = 0; a < actions; ++a)
    for (Index s = 0; s < n; ++s) {
      Vector row(n);
      for (Index t = 0; t < n; ++t) row[t] = 0.05 + rng.uniform01();
      inst.mdp.transition[a].row(s) = (row / row.sum()).transpose();
    }
  const double reward_values[] = {0.0, 0.25, 0.5, 1.0};
  inst.mdp.reward.resize(n * actions, 1);
  for (Index i = 0; i < n * actions; ++i)
    inst.mdp.reward(i, 0) = reward_values[static_cast<int>(rng.uniform01() * 4.0) % 4];
  inst.policy.probs.resize(n, actions);
  for (Index s = 0; s < n; ++s) {
    Vector row(actions);
    for (Index a = 0; a < actions; ++a) row[a] = 0.2 + rng.uniform01();
    inst.policy.probs.row(s) = (row / row.sum()).transpose();
  }
  inst.mdp.validate();
  inst.policy.validate(inst.mdp);
  const double hi = 1.0 / (1.0 - *inst.mdp.discount);
  const Index d = 4 + static_cast<Index>(rng.uniform01() * 4.0);
  inst.support = ScalarSupport::uniform(n, 0.0, hi, d);
  inst.uniform_law = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return inst;
}

}  // namespace reference
}  // namespace distlab
