#include <doctest.h>

#include <cmath>

#include "distlab/cramer.hpp"
#include "distlab/oracle.hpp"
#include "distlab/reference.hpp"
#include "test_util.hpp"

using namespace distlab;

namespace {

ScalarSupport grid01() {
  ScalarSupport s;
  s.atoms = {Vector::LinSpaced(2, 0.0, 1.0)};
  return s;
}

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("cramer distance on the unit grid") {
  const ScalarSupport s = grid01();
  CHECK(cramer_distance(vec({1, 0}), vec({0, 1}), s, 0) == doctest::Approx(1.0));
  // CDF gap 0.5 on [0,1): integral 0.25, distance 0.5.
  CHECK(cramer_distance(vec({0.5, 0.5}), vec({0, 1}), s, 0) == doctest::Approx(0.5));
  CHECK(cramer_distance(vec({0.3, 0.7}), vec({0.3, 0.7}), s, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(cramer_distance(vec({1, 0, 0}), vec({0, 1}), s, 0), DimensionMismatch);
}

TEST_CASE("cumulative-mass embedding and its inverse") {
  const ScalarSupport s = grid01();
  const Vector block = embed_ctd(vec({1, 0}), s, 0);
  CHECK(block[0] == doctest::Approx(1.0));
  CHECK(block[1] == doctest::Approx(0.0));

  // All mass on the last atom embeds to the zero block.
  ScalarSupport s3;
  s3.atoms = {Vector::LinSpaced(3, 0.0, 2.0)};
  CHECK(embed_ctd(vec({0, 0, 1}), s3, 0).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  RandomStream rng(5);
  for (int i = 0; i < 200; ++i) {
    const Vector p = testutil::random_simplex(rng, 3);
    const Vector back = unembed_ctd(embed_ctd(p, s3, 0), s3, 0);
    CHECK((back - p).cwiseAbs().maxCoeff() <= 1e-14);
  }

  CHECK_THROWS_AS(unembed_ctd(vec({0.5, 0.2, 0.0}), s3, 0), InvalidBlock);
  CHECK_THROWS_AS(unembed_ctd(vec({0.5, 0.6, 0.4}), s3, 0), InvalidBlock);
}

TEST_CASE("linear-interpolation projection splits, snaps, and clips") {
  const ScalarSupport s = grid01();
  const double loc_mid[] = {0.25};
  const double mass[] = {1.0};
  const Vector mid = project_categorical(loc_mid, mass, s, 0);
  CHECK(mid[0] == doctest::Approx(0.75));
  CHECK(mid[1] == doctest::Approx(0.25));

  const double loc_node[] = {1.0};
  const Vector node = project_categorical(loc_node, mass, s, 0);
  CHECK(node[0] == doctest::Approx(0.0));
  CHECK(node[1] == doctest::Approx(1.0));

  const double loc_out[] = {1.5};
  const Vector clipped = project_categorical(loc_out, mass, s, 0);
  CHECK(clipped[0] == doctest::Approx(0.0));
  CHECK(clipped[1] == doctest::Approx(1.0));
}

TEST_CASE("projection matches the dense simplex search oracle") {
  const Geometry geometry{CramerGeometry{grid01()}};
  const auto& support = std::get<CramerGeometry>(geometry).support;

  for (double loc : {0.25, 1.5, -0.5, 0.62}) {
    Matrix points(1, 1);
    points << loc;
    const Vector masses = Vector::Ones(1);
    const Vector analytic = project_categorical(
        std::span<const double>(points.data(), 1),
        std::span<const double>(masses.data(), 1), support, 0);
    const Vector oracle_best =
        oracle::brute_force_projection_oracle(points, masses, geometry, 0, 1e-3);
    // The analytic output may only beat the oracle grid by its resolution.
    oracle::AtomicLaw target;
    target.points = points;
    target.masses = masses;
    oracle::AtomicLaw a_law, o_law;
    a_law.points.resize(2, 1);
    a_law.points << 0.0, 1.0;
    o_law.points = a_law.points;
    a_law.masses = analytic;
    o_law.masses = oracle_best;
    CHECK(oracle::cramer_atomic(a_law, target) <=
          oracle::cramer_atomic(o_law, target) + 1e-3);
  }
}

TEST_CASE("sampled target pipeline on a one-state instance") {
  const auto inst = reference::one_state(1.0, 0.5, Vector::LinSpaced(3, 0.0, 2.0));
  const ScalarSupport& s = inst.support;

  // Next estimate delta_0: pushed atom lands on 1, embedding of delta_1.
  BlockField blocks{embed_ctd(vec({1, 0, 0}), s, 0)};
  Vector target = sampled_target_ctd(blocks, 0, 1.0, 0, 0.5, s);
  CHECK((target - vec({0, 1, 0})).cwiseAbs().maxCoeff() <= 1e-14);

  // r = 0 and next estimate delta_2: atom at 1 again.
  blocks[0] = embed_ctd(vec({0, 0, 1}), s, 0);
  target = sampled_target_ctd(blocks, 0, 0.0, 0, 0.5, s);
  CHECK((target - vec({0, 1, 0})).cwiseAbs().maxCoeff() <= 1e-14);

  // r = 0 and next estimate delta_0: stays at the origin.
  blocks[0] = embed_ctd(vec({1, 0, 0}), s, 0);
  target = sampled_target_ctd(blocks, 0, 0.0, 0, 0.5, s);
  CHECK((target - vec({1, 1, 0})).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("projected operator fixed points on one-state instances") {
  // Zero reward with 0 on the grid: delta_0 is fixed.
  const auto zero = reference::one_state(0.0, 0.5, Vector::LinSpaced(3, 0.0, 2.0));
  WeightField eta{vec({1, 0, 0})};
  WeightField mapped = projected_bellman_ctd(eta, zero.mdp, zero.policy, zero.support);
  CHECK((mapped[0] - eta[0]).cwiseAbs().maxCoeff() <= 1e-15);

  // Grid {0,1,3}: one application of delta_0 gives delta_1 (atom at 1).
  const auto skewed = reference::one_state(1.0, 0.5, vec({0, 1, 3}));
  mapped = projected_bellman_ctd(WeightField{vec({1, 0, 0})}, skewed.mdp, skewed.policy,
                                 skewed.support);
  CHECK((mapped[0] - vec({0, 1, 0})).cwiseAbs().maxCoeff() <= 1e-15);

  // Return r/(1-gamma) = 2 on the grid: fixed point is delta_2.
  const auto exact = reference::one_state(1.0, 0.5, Vector::LinSpaced(3, 0.0, 2.0));
  const auto [fp, iters] = fixed_point_ctd(exact.mdp, exact.policy, exact.support, 1e-12);
  CHECK((fp[0] - vec({0, 0, 1})).cwiseAbs().maxCoeff() <= 1e-11);
  CHECK(iters >= 1);

  // Off-grid return splits across {1, 3} with the hand-solved weights.
  const auto [fp2, iters2] =
      fixed_point_ctd(skewed.mdp, skewed.policy, skewed.support, 1e-12);
  CHECK((fp2[0] - vec({0, 0.5, 0.5})).cwiseAbs().maxCoeff() <= 1e-11);

  // Halving the tolerance moves the result by at most tol.
  const auto [fp3, iters3] =
      fixed_point_ctd(skewed.mdp, skewed.policy, skewed.support, 0.5e-12);
  CHECK(cramer_distance(fp2[0], fp3[0], skewed.support, 0) <= 1e-12);
}

TEST_CASE("Monte Carlo mean of sampled targets matches the exact operator") {
  const auto inst = reference::three_state();
  RandomStream rng(99);
  WeightField eta = testutil::random_field(rng, inst.support);
  const BlockField blocks = embed_field_ctd(eta, inst.support);
  const WeightField exact = projected_bellman_ctd(eta, inst.mdp, inst.policy, inst.support);
  const Index s = 0;
  const Vector exact_block = embed_ctd(exact[s], inst.support, s);

  const int n = 100000;
  Vector mean = Vector::Zero(inst.support.dim(s));
  Matrix sq = Matrix::Zero(inst.support.dim(s), 1);
  for (int i = 0; i < n; ++i) {
    const Transition t = sample_transition(inst.mdp, inst.policy, s, rng);
    const Vector target =
        sampled_target_ctd(blocks, s, t.reward[0], t.next_state, 0.5, inst.support);
    mean += target;
    sq.col(0) += target.cwiseProduct(target);
  }
  mean /= n;
  for (Index j = 0; j < mean.size(); ++j) {
    const double var = sq(j, 0) / n - mean[j] * mean[j];
    const double se = std::sqrt(std::max(var, 0.0) / n);
    CHECK(std::abs(mean[j] - exact_block[j]) <= 4.0 * se + 1e-9);
  }
}

TEST_CASE("isometry: cramer distance equals embedded Euclidean distance") {
  ScalarSupport s;
  s.atoms = {vec({-1.0, 0.0, 0.5, 2.0, 2.25})};
  RandomStream rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Vector p = testutil::random_simplex(rng, 5);
    const Vector q = testutil::random_simplex(rng, 5);
    const double metric = cramer_distance(p, q, s, 0);
    const double euclid = (embed_ctd(p, s, 0) - embed_ctd(q, s, 0)).norm();
    CHECK(std::abs(metric - euclid) <= 1e-10);
  }
}

TEST_CASE("exact operator contracts at rate sqrt(gamma)") {
  const auto inst = reference::three_state();
  const double beta = std::sqrt(0.5);
  RandomStream rng(17);
  for (int i = 0; i < 1000; ++i) {
    const WeightField a = testutil::random_field(rng, inst.support);
    const WeightField b = testutil::random_field(rng, inst.support);
    const double before = sup_cramer(a, b, inst.support);
    const double after =
        sup_cramer(projected_bellman_ctd(a, inst.mdp, inst.policy, inst.support),
                   projected_bellman_ctd(b, inst.mdp, inst.policy, inst.support),
                   inst.support);
    CHECK(after <= beta * before + 1e-9);
  }
}

TEST_CASE("samplewise target map is nonexpansive in the block-sup norm") {
  const auto inst = reference::three_state();
  RandomStream rng(23);
  for (int i = 0; i < 300; ++i) {
    const BlockField u = embed_field_ctd(testutil::random_field(rng, inst.support),
                                         inst.support);
    const BlockField v = embed_field_ctd(testutil::random_field(rng, inst.support),
                                         inst.support);
    double sup = 0.0;
    for (Index s = 0; s < 3; ++s) sup = std::max(sup, (u[s] - v[s]).norm());
    const Index s = static_cast<Index>(rng.uniform01() * 3.0);
    const Index sn = static_cast<Index>(rng.uniform01() * 3.0);
    const double r = rng.uniform01();
    const Vector tu = sampled_target_ctd(u, s, r, sn, 0.5, inst.support);
    const Vector tv = sampled_target_ctd(v, s, r, sn, 0.5, inst.support);
    CHECK((tu - tv).norm() <= sup + 1e-12);
  }
}

TEST_CASE("embedded blocks obey the support-range bound") {
  ScalarSupport s;
  s.atoms = {vec({-0.5, 0.25, 1.0, 1.75})};
  const double range = s.range(0);
  RandomStream rng(31);
  for (int i = 0; i < 500; ++i) {
    const Vector block = embed_ctd(testutil::random_simplex(rng, 4), s, 0);
    CHECK(block.squaredNorm() <= range + 1e-12);
  }
}

TEST_CASE("centered one-sample perturbation stays within 2 B_C") {
  const auto inst = reference::three_state();
  double b_c = 0.0;
  for (Index s = 0; s < 3; ++s) b_c = std::max(b_c, std::sqrt(inst.support.range(s)));
  RandomStream rng(41);
  for (int i = 0; i < 200; ++i) {
    const WeightField eta = testutil::random_field(rng, inst.support);
    const BlockField blocks = embed_field_ctd(eta, inst.support);
    const WeightField exact =
        projected_bellman_ctd(eta, inst.mdp, inst.policy, inst.support);
    const Index s = static_cast<Index>(rng.uniform01() * 3.0);
    const Vector exact_block = embed_ctd(exact[s], inst.support, s);
    const Transition t = sample_transition(inst.mdp, inst.policy, s, rng);
    const Vector target =
        sampled_target_ctd(blocks, s, t.reward[0], t.next_state, 0.5, inst.support);
    CHECK((target - exact_block).norm() <= 2.0 * b_c + 1e-12);
  }
}
