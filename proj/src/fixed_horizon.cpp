#include "distlab/fixed_horizon.hpp"

#include <algorithm>
#include <cmath>

namespace distlab {

namespace {

/// Pushforward of the layer-(h-1) law at s_next by the shared reward, as an
/// atomic (points, masses) pair. Layer 0 contributes the single atom r.
void layer_target_atoms(const HorizonGeometry& geometry, const HorizonStack& stack, int h,
                        const Vector& r, Index s_next, Matrix& points, Vector& masses) {
  if (h == 1) {
    points = r.transpose();
    masses = Vector::Ones(1);
    return;
  }
  const Geometry& below = geometry.layers[h - 2];
  const Vector weights = unembed_state(below, s_next, stack.blocks[h - 2][s_next]);
  std::visit(
      [&](const auto& geo) {
        using G = std::decay_t<decltype(geo)>;
        if constexpr (std::is_same_v<G, CramerGeometry>) {
          const Vector& atoms = geo.support.atoms[s_next];
          points.resize(atoms.size(), 1);
          points.col(0) = atoms.array() + r[0];
        } else {
          points = geo.support.atoms[s_next].rowwise() + r.transpose();
        }
      },
      below);
  masses = weights;
}

}  // namespace

double weighted_sup_norm(const HorizonStack& stack) {
  double worst = 0.0;
  double weight = 1.0;
  for (const BlockField& layer : stack.blocks) {
    weight *= stack.lambda;
    for (const Vector& block : layer) worst = std::max(worst, weight * block.norm());
  }
  return worst;
}

double weighted_sup_distance(const HorizonStack& a, const HorizonStack& b) {
  double worst = 0.0;
  double weight = 1.0;
  for (std::size_t h = 0; h < a.blocks.size(); ++h) {
    weight *= a.lambda;
    for (std::size_t s = 0; s < a.blocks[h].size(); ++s)
      worst = std::max(worst, weight * (a.blocks[h][s] - b.blocks[h][s]).norm());
  }
  return worst;
}

double weighted_sup_metric(const HorizonGeometry& geometry, const HorizonField& a,
                           const HorizonField& b, double lambda) {
  double worst = 0.0;
  double weight = 1.0;
  for (int h = 1; h <= geometry.horizon(); ++h) {
    weight *= lambda;
    const Geometry& g = geometry.layers[h - 1];
    for (Index s = 0; s < geometry.n_states(); ++s)
      worst = std::max(worst,
                       weight * state_metric(g, s, a.layers[h - 1][s], b.layers[h - 1][s]));
  }
  return worst;
}

HorizonStack embed_stack(const HorizonGeometry& geometry, const HorizonField& field,
                         double lambda) {
  HorizonStack stack;
  stack.lambda = lambda;
  stack.blocks.reserve(field.layers.size());
  for (int h = 1; h <= geometry.horizon(); ++h)
    stack.blocks.push_back(embed_field(geometry.layers[h - 1], field.layers[h - 1]));
  return stack;
}

HorizonField unembed_stack(const HorizonGeometry& geometry, const HorizonStack& stack) {
  HorizonField field;
  field.layers.reserve(stack.blocks.size());
  for (int h = 1; h <= geometry.horizon(); ++h)
    field.layers.push_back(unembed_field(geometry.layers[h - 1], stack.blocks[h - 1]));
  return field;
}

std::vector<Vector> stacked_sampled_target(const HorizonGeometry& geometry,
                                           const HorizonStack& stack, Index s, const Vector& r,
                                           Index s_next) {
  std::vector<Vector> targets(geometry.horizon());
  Matrix points;
  Vector masses;
  for (int h = 1; h <= geometry.horizon(); ++h) {
    layer_target_atoms(geometry, stack, h, r, s_next, points, masses);
    const Geometry& g = geometry.layers[h - 1];
    targets[h - 1] = embed_state(g, s, project_state(g, s, points, masses));
  }
  return targets;
}

namespace {

/// Exact layer-h update from the layer-(h-1) weight field (nullptr encodes
/// the implicit layer 0). Both statewise projections are affine in the
/// target measure, so the full mixture is projected in one pass.
WeightField apply_layer_fh(const HorizonGeometry& geometry, const FiniteMdp& mdp,
                           const Policy& policy, int h, const WeightField* below_field) {
  const Geometry& g = geometry.layers[h - 1];
  WeightField out(mdp.n_states);
  for (Index s = 0; s < mdp.n_states; ++s) {
    std::vector<Matrix> point_groups;
    std::vector<Vector> mass_groups;
    Index n_atoms = 0;
    for (Index a = 0; a < mdp.n_actions; ++a) {
      const double pa = policy.probs(s, a);
      if (pa == 0.0) continue;
      const Vector r = mdp.reward_at(s, a).transpose();
      for (Index sn = 0; sn < mdp.n_states; ++sn) {
        const double w = pa * mdp.transition[a](s, sn);
        if (w == 0.0) continue;
        if (h == 1) {
          point_groups.push_back(r.transpose());
          mass_groups.push_back(Vector::Constant(1, w));
          n_atoms += 1;
        } else {
          const Geometry& below = geometry.layers[h - 2];
          std::visit(
              [&](const auto& geo) {
                using G = std::decay_t<decltype(geo)>;
                if constexpr (std::is_same_v<G, CramerGeometry>) {
                  Matrix pts(geo.support.dim(sn), 1);
                  pts.col(0) = geo.support.atoms[sn].array() + r[0];
                  point_groups.push_back(std::move(pts));
                } else {
                  point_groups.push_back(geo.support.atoms[sn].rowwise() + r.transpose());
                }
              },
              below);
          mass_groups.push_back(w * (*below_field)[sn]);
          n_atoms += point_groups.back().rows();
        }
      }
    }
    const Index q = point_groups.front().cols();
    Matrix points(n_atoms, q);
    Vector masses(n_atoms);
    Index offset = 0;
    for (std::size_t i = 0; i < point_groups.size(); ++i) {
      const Index rows = point_groups[i].rows();
      points.middleRows(offset, rows) = point_groups[i];
      masses.segment(offset, rows) = mass_groups[i];
      offset += rows;
    }
    out[s] = project_state(g, s, points, masses);
  }
  return out;
}

}  // namespace

HorizonField projected_bellman_fh(const HorizonGeometry& geometry, const FiniteMdp& mdp,
                                  const Policy& policy, const HorizonField& eta) {
  HorizonField out;
  out.layers.resize(geometry.horizon());
  for (int h = 1; h <= geometry.horizon(); ++h)
    out.layers[h - 1] = apply_layer_fh(geometry, mdp, policy, h,
                                       h == 1 ? nullptr : &eta.layers[h - 2]);
  return out;
}

HorizonField fixed_point_fh(const HorizonGeometry& geometry, const FiniteMdp& mdp,
                            const Policy& policy) {
  // Layer h depends only on layer h - 1, so one forward pass is exact.
  HorizonField fp;
  fp.layers.resize(geometry.horizon());
  for (int h = 1; h <= geometry.horizon(); ++h)
    fp.layers[h - 1] = apply_layer_fh(geometry, mdp, policy, h,
                                      h == 1 ? nullptr : &fp.layers[h - 2]);
  return fp;
}

EpisodicTrace run_episodic(const HorizonGeometry& geometry, const FiniteMdp& mdp,
                           const Policy& policy, const Vector& nu0,
                           const EpisodicRunConfig& config,
                           const HorizonField* initial_field,
                           const HorizonField* fixed_point_field) {
  const int H = geometry.horizon();
  const PhaseProfile phases = phase_profile(mdp, policy, nu0, H);
  if (!phases.full_support)
    throw PhaseSupportViolation("some phase distribution has a zero entry (rho_min = 0)");

  const HorizonField fp = fixed_point_field ? *fixed_point_field
                                            : fixed_point_fh(geometry, mdp, policy);
  const HorizonStack star = embed_stack(geometry, fp, config.lambda);

  HorizonField init;
  if (initial_field) {
    init = *initial_field;
  } else {
    init.layers.resize(H);
    for (int h = 1; h <= H; ++h)
      init.layers[h - 1] = first_atom_field(geometry.layers[h - 1]);
  }
  const HorizonStack init_stack = embed_stack(geometry, init, config.lambda);

  EpisodicTrace trace;
  trace.boundary.checkpoints = config.checkpoints.empty()
                                   ? geometric_checkpoints(config.n_episodes)
                                   : config.checkpoints;
  const auto n_checks = static_cast<Index>(trace.boundary.checkpoints.size());
  trace.boundary.sq_error.resize(config.n_replications, n_checks);
  trace.boundary.seeds.resize(config.n_replications);
  trace.within_steps = config.within_episode_steps;
  if (!trace.within_steps.empty())
    trace.within_sq_error.resize(config.n_replications,
                                 static_cast<Index>(trace.within_steps.size()));

  trace.boundary.bar_alpha.resize(config.n_episodes);
  trace.boundary.bar_alpha2.resize(config.n_episodes);
  for (std::int64_t m = 0; m < config.n_episodes; ++m) {
    double a1 = 0.0, a2 = 0.0;
    for (int u = 0; u < H; ++u) {
      const double a = step_size(config.schedule, m * H + u);
      a1 += a;
      a2 += a * a;
    }
    trace.boundary.bar_alpha[m] = a1;
    trace.boundary.bar_alpha2[m] = a2;
  }

  for (int rep = 0; rep < config.n_replications; ++rep) {
    const std::uint64_t seed = replication_seed(config.base_seed, rep);
    trace.boundary.seeds[rep] = seed;
    RandomStream rng(seed);
    HorizonStack stack = init_stack;

    Index check = 0;
    Index within_check = 0;
    for (std::int64_t m = 0; m <= config.n_episodes; ++m) {
      if (check < n_checks && trace.boundary.checkpoints[check] == m) {
        const double err = weighted_sup_distance(stack, star);
        trace.boundary.sq_error(rep, check) = err * err;
        ++check;
      }
      if (m == config.n_episodes) break;

      Index state = rng.categorical(nu0);
      for (int t = 0; t < H; ++t) {
        const std::int64_t k = m * H + t;
        if (within_check < static_cast<Index>(trace.within_steps.size()) &&
            trace.within_steps[within_check] == k) {
          const double err = weighted_sup_distance(stack, star);
          trace.within_sq_error(rep, within_check) = err * err;
          ++within_check;
        }
        const Transition tr = sample_transition(mdp, policy, state, rng);
        const std::vector<Vector> targets =
            stacked_sampled_target(geometry, stack, state, tr.reward, tr.next_state);
        const double alpha = step_size(config.schedule, k);
        for (int h = 1; h <= H; ++h)
          async_update(stack.blocks[h - 1], state, targets[h - 1], alpha);
        state = tr.next_state;
      }
    }
  }
  return trace;
}

}  // namespace distlab
