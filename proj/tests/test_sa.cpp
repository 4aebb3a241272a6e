#include <doctest.h>

#include <cmath>

#include "distlab/reference.hpp"
#include "distlab/sa.hpp"
#include "test_util.hpp"

using namespace distlab;

TEST_CASE("step-size laws") {
  CHECK(step_size(ConstantStep{0.1}, 0) == doctest::Approx(0.1));
  CHECK(step_size(ConstantStep{0.1}, 12345) == doctest::Approx(0.1));
  CHECK(step_size(LinearStep{2.0, 10.0}, 0) == doctest::Approx(0.2));
  CHECK(step_size(LinearStep{2.0, 10.0}, 10) == doctest::Approx(0.1));
  CHECK(step_size(PolyStep{1.0, 1.0, 0.5}, 3) == doctest::Approx(0.5));
  // Nonincreasing in k.
  for (const StepSchedule& s :
       {StepSchedule{ConstantStep{0.2}}, StepSchedule{LinearStep{3.0, 4.0}},
        StepSchedule{PolyStep{1.5, 2.0, 0.7}}})
    for (std::int64_t k = 0; k < 100; ++k)
      CHECK(step_size(s, k + 1) <= step_size(s, k) + 1e-15);
}

TEST_CASE("async update touches exactly one block") {
  BlockField u{Vector::Ones(2), 2.0 * Vector::Ones(2)};
  const Vector target = Vector::Zero(2);

  BlockField same = u;
  async_update(same, 0, target, 0.0);
  CHECK(same[0] == u[0]);

  BlockField replaced = u;
  async_update(replaced, 0, target, 1.0);
  CHECK(replaced[0] == target);
  CHECK(replaced[1] == u[1]);

  BlockField half = u;
  async_update(half, 1, target, 0.5);
  CHECK(half[0] == u[0]);
  CHECK((half[1] - Vector::Ones(2)).cwiseAbs().maxCoeff() <= 1e-16);
}

TEST_CASE("block norms and the two-sided comparison lemma") {
  BlockField u(2);
  u[0] = Vector(2);
  u[0] << 3.0, 4.0;
  u[1] = Vector(2);
  u[1] << 0.0, 5.0;
  const BlockNorms n = block_norms(u, 2.0);
  CHECK(n.sup == doctest::Approx(5.0));
  CHECK(n.mixed == doctest::Approx(std::sqrt(50.0)));

  BlockField single{u[0]};
  const BlockNorms ns = block_norms(single, 3.0);
  CHECK(ns.sup == doctest::Approx(ns.mixed));

  RandomStream rng(2);
  for (int i = 0; i < 1000; ++i) {
    BlockField w(4);
    for (auto& block : w) {
      block.resize(3);
      for (Index j = 0; j < 3; ++j) block[j] = 2.0 * rng.uniform01() - 1.0;
    }
    const double p = 2.0 + 6.0 * rng.uniform01();
    const BlockNorms nn = block_norms(w, p);
    CHECK(nn.sup <= nn.mixed + 1e-12);
    CHECK(nn.mixed <= std::pow(4.0, 1.0 / p) * nn.sup + 1e-12);
  }
}

TEST_CASE("runner rejects unsupported regimes and degenerate laws") {
  const auto inst = reference::three_state();
  const Geometry geometry{CramerGeometry{inst.support}};
  DiscountedRunConfig config;
  config.schedule = ConstantStep{0.1};
  config.n_steps = 4;
  CHECK_THROWS_AS(run_discounted(geometry, inst.mdp, inst.policy,
                                 EpisodicRegime{inst.uniform_law, 2}, config),
                  RegimeUnsupported);
  Vector bad(3);
  bad << 0.5, 0.5, 0.0;
  CHECK_THROWS_AS(
      run_discounted(geometry, inst.mdp, inst.policy, IidRegime{bad}, config),
      DegenerateSampling);
}

TEST_CASE("checkpoint zero stores the exact initial error and seeds reproduce") {
  const auto inst = reference::three_state();
  const Geometry geometry{CramerGeometry{inst.support}};
  const auto [fp, iters] = fixed_point(geometry, inst.mdp, inst.policy, 1e-11);

  DiscountedRunConfig config;
  config.schedule = LinearStep{2.0, 4.0};
  config.n_steps = 512;
  config.n_replications = 3;
  config.base_seed = 77;
  const WeightField init = first_atom_field(geometry);
  const double init_err = sup_metric(geometry, init, fp);

  const RunTrace t1 = run_discounted(geometry, inst.mdp, inst.policy,
                                     IidRegime{inst.uniform_law}, config, &init, &fp);
  const RunTrace t2 = run_discounted(geometry, inst.mdp, inst.policy,
                                     IidRegime{inst.uniform_law}, config, &init, &fp);
  CHECK(t1.checkpoints.front() == 0);
  for (int rep = 0; rep < 3; ++rep)
    CHECK(t1.sq_error(rep, 0) == doctest::Approx(init_err * init_err).epsilon(1e-12));
  CHECK((t1.sq_error - t2.sq_error).cwiseAbs().maxCoeff() == 0.0);  // bit identical
  CHECK(t1.seeds == t2.seeds);
}

TEST_CASE("iterates remain valid representations along the run") {
  const auto inst = reference::three_state();

  // Scalar categorical: every visited block must unembed to a simplex point.
  {
    const Geometry geometry{CramerGeometry{inst.support}};
    RandomStream rng(5);
    BlockField u = embed_field(geometry, first_atom_field(geometry));
    Index state = 0;
    for (int k = 0; k < 2000; ++k) {
      const Transition t = sample_transition(inst.mdp, inst.policy, state, rng);
      const Vector target = sampled_target(geometry, u, state, t.reward, t.next_state, 0.5);
      async_update(u, state, target, step_size(LinearStep{1.0, 2.0}, k));
      state = t.next_state;
    }
    for (Index s = 0; s < 3; ++s) {
      const Vector w = unembed_ctd(u[s], inst.support, s);
      CHECK(w.minCoeff() >= -1e-12);
      CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  // Signed categorical: unit total mass is preserved by every update.
  {
    const auto vec_inst = reference::two_state_vector();
    const Geometry geometry{MmdGeometry{vec_inst.support}};
    RandomStream rng(6);
    BlockField u = embed_field(geometry, first_atom_field(geometry));
    Index state = 0;
    for (int k = 0; k < 1000; ++k) {
      const Transition t = sample_transition(vec_inst.mdp, vec_inst.policy, state, rng);
      const Vector target = sampled_target(geometry, u, state, t.reward, t.next_state, 0.5);
      async_update(u, state, target, 0.3);
      state = t.next_state;
    }
    for (Index s = 0; s < 2; ++s) {
      const Vector w = unembed_mtd(u[s], vec_inst.support.gram[s]);
      CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("markov and iid runs approach the same fixed point") {
  const auto inst = reference::two_state_chain();
  const Geometry geometry{CramerGeometry{inst.support}};
  const auto [fp, iters] = fixed_point(geometry, inst.mdp, inst.policy, 1e-11);

  DiscountedRunConfig config;
  config.schedule = LinearStep{8.0, 8.0};
  config.n_steps = 200000;
  config.checkpoints = {0, config.n_steps};
  config.n_replications = 1;
  config.base_seed = 11;

  BlockField markov_final, iid_final;
  const RunTrace tm =
      run_discounted(geometry, inst.mdp, inst.policy, MarkovRegime{Index{0}}, config,
                     nullptr, &fp, &markov_final);
  const RunTrace ti =
      run_discounted(geometry, inst.mdp, inst.policy, IidRegime{inst.uniform_law}, config,
                     nullptr, &fp, &iid_final);
  CHECK(std::sqrt(tm.sq_error(0, 1)) <= 5e-2);
  CHECK(std::sqrt(ti.sq_error(0, 1)) <= 5e-2);
  double gap = 0.0;
  for (Index s = 0; s < 2; ++s)
    gap = std::max(gap, (markov_final[s] - iid_final[s]).norm());
  CHECK(gap <= 1e-1);
}
