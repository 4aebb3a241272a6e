#include "distlab/sa.hpp"

#include <algorithm>
#include <cmath>

namespace distlab {

namespace {

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

double sup_block_distance(const BlockField& a, const BlockField& b) {
  double worst = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s)
    worst = std::max(worst, (a[s] - b[s]).norm());
  return worst;
}

}  // namespace

double step_size(const StepSchedule& schedule, std::int64_t k) {
  return std::visit(
      Overload{[&](const ConstantStep& s) { return s.alpha; },
               [&](const LinearStep& s) {
                 return s.alpha / (static_cast<double>(k) + s.offset);
               },
               [&](const PolyStep& s) {
                 return s.alpha / std::pow(static_cast<double>(k) + s.offset, s.exponent);
               }},
      schedule);
}

std::string schedule_label(const StepSchedule& schedule) {
  return std::visit(
      Overload{[](const ConstantStep& s) {
                 return "constant(alpha=" + std::to_string(s.alpha) + ")";
               },
               [](const LinearStep& s) {
                 return "linear(alpha=" + std::to_string(s.alpha) +
                        ", offset=" + std::to_string(s.offset) + ")";
               },
               [](const PolyStep& s) {
                 return "poly(alpha=" + std::to_string(s.alpha) +
                        ", offset=" + std::to_string(s.offset) +
                        ", z=" + std::to_string(s.exponent) + ")";
               }},
      schedule);
}

void async_update(BlockField& iterate, Index s, const Vector& target, double alpha) {
  iterate[s] = (1.0 - alpha) * iterate[s] + alpha * target;
}

BlockNorms block_norms(const BlockField& iterate, double p) {
  BlockNorms norms{0.0, 0.0};
  double acc = 0.0;
  for (const Vector& block : iterate) {
    const double n = block.norm();
    norms.sup = std::max(norms.sup, n);
    acc += std::pow(n, p);
  }
  norms.mixed = std::pow(acc, 1.0 / p);
  return norms;
}

std::vector<std::int64_t> geometric_checkpoints(std::int64_t n_steps) {
  std::vector<std::int64_t> ks{0};
  for (std::int64_t k = 1; k < n_steps; k *= 2) ks.push_back(k);
  if (ks.back() != n_steps) ks.push_back(n_steps);
  return ks;
}

Vector RunTrace::mean_curve() const { return sq_error.colwise().mean(); }

Vector RunTrace::stderr_curve() const {
  const Index reps = sq_error.rows();
  if (reps < 2) return Vector::Zero(sq_error.cols());
  const Eigen::RowVectorXd mean = sq_error.colwise().mean();
  const Eigen::RowVectorXd var =
      (sq_error.rowwise() - mean).array().square().colwise().sum() /
      static_cast<double>(reps - 1);
  return (var / static_cast<double>(reps)).cwiseSqrt().transpose();
}

RunTrace run_discounted(const Geometry& geometry, const FiniteMdp& mdp, const Policy& policy,
                        const SamplingRegime& regime, const DiscountedRunConfig& config,
                        const WeightField* initial_field,
                        const WeightField* fixed_point_field,
                        BlockField* final_blocks_out) {
  if (std::holds_alternative<EpisodicRegime>(regime))
    throw RegimeUnsupported("episodic sampling is the fixed-horizon runner's job");
  if (const auto* iid = std::get_if<IidRegime>(&regime)) {
    if (iid->law.minCoeff() <= 0.0)
      throw DegenerateSampling("iid state law must have full support");
  }

  const double gamma = mdp.discount.value();
  WeightField star_weights = fixed_point_field
                                 ? *fixed_point_field
                                 : fixed_point(geometry, mdp, policy,
                                               config.fixed_point_tol).first;
  const BlockField star = embed_field(geometry, star_weights);
  const WeightField init =
      initial_field ? *initial_field : first_atom_field(geometry);
  const BlockField init_blocks = embed_field(geometry, init);

  RunTrace trace;
  trace.checkpoints = config.checkpoints.empty() ? geometric_checkpoints(config.n_steps)
                                                 : config.checkpoints;
  const auto n_checks = static_cast<Index>(trace.checkpoints.size());
  trace.sq_error.resize(config.n_replications, n_checks);
  trace.seeds.resize(config.n_replications);

  for (int rep = 0; rep < config.n_replications; ++rep) {
    const std::uint64_t seed = replication_seed(config.base_seed, rep);
    trace.seeds[rep] = seed;
    RandomStream rng(seed);
    BlockField iterate = init_blocks;

    Index state = 0;
    const auto draw_initial = Overload{
        [&](const IidRegime& r) { return rng.categorical(r.law); },
        [&](const MarkovRegime& r) {
          if (const auto* s0 = std::get_if<Index>(&r.init)) return *s0;
          return rng.categorical(std::get<Vector>(r.init));
        },
        [&](const EpisodicRegime&) -> Index { return 0; }};
    state = std::visit(draw_initial, regime);

    Index check = 0;
    for (std::int64_t k = 0; k <= config.n_steps; ++k) {
      if (check < n_checks && trace.checkpoints[check] == k) {
        const double err = sup_block_distance(iterate, star);
        trace.sq_error(rep, check) = err * err;
        ++check;
      }
      if (k == config.n_steps) break;

      const Transition t = sample_transition(mdp, policy, state, rng);
      const Vector target =
          sampled_target(geometry, iterate, state, t.reward, t.next_state, gamma);
      async_update(iterate, state, target, step_size(config.schedule, k));

      if (std::holds_alternative<IidRegime>(regime))
        state = rng.categorical(std::get<IidRegime>(regime).law);
      else
        state = t.next_state;
    }
    if (final_blocks_out && rep == 0) *final_blocks_out = iterate;
  }
  return trace;
}

}  // namespace distlab
