#include "distlab/cramer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace distlab {

namespace {
constexpr double kBlockTol = 1e-9;
constexpr int kMaxSweeps = 1000000;
}  // namespace

void ScalarSupport::validate() const {
  if (atoms.empty()) throw EmptySupport("no states");
  for (std::size_t s = 0; s < atoms.size(); ++s) {
    if (atoms[s].size() < 1) throw EmptySupport("state " + std::to_string(s));
    for (Index j = 0; j + 1 < atoms[s].size(); ++j)
      if (!(atoms[s][j] < atoms[s][j + 1]))
        throw ConfigError("support atoms at state " + std::to_string(s) +
                          " are not strictly increasing");
  }
}

ScalarSupport ScalarSupport::uniform(Index n_states, double lo, double hi, Index count) {
  ScalarSupport support;
  support.atoms.assign(static_cast<std::size_t>(n_states),
                       Vector::LinSpaced(count, lo, hi));
  return support;
}

double cramer_distance(const Vector& mu, const Vector& nu, const ScalarSupport& support,
                       Index s) {
  const Index d = support.dim(s);
  if (mu.size() != d || nu.size() != d)
    throw DimensionMismatch("weights do not match support at state " + std::to_string(s));
  double acc = 0.0;
  double cmu = 0.0, cnu = 0.0;
  for (Index j = 0; j + 1 < d; ++j) {
    cmu += mu[j];
    cnu += nu[j];
    const double diff = cmu - cnu;
    acc += support.gap(s, j) * diff * diff;
  }
  return std::sqrt(acc);
}

Vector embed_ctd(const Vector& weights, const ScalarSupport& support, Index s) {
  const Index d = support.dim(s);
  if (weights.size() != d) throw DimensionMismatch("embed_ctd at state " + std::to_string(s));
  Vector block(d);
  double cum = 0.0;
  for (Index j = 0; j + 1 < d; ++j) {
    cum += weights[j];
    block[j] = std::sqrt(support.gap(s, j)) * cum;
  }
  block[d - 1] = 0.0;
  return block;
}

Vector unembed_ctd(const Vector& block, const ScalarSupport& support, Index s) {
  const Index d = support.dim(s);
  if (block.size() != d)
    throw DimensionMismatch("unembed_ctd at state " + std::to_string(s));
  if (std::abs(block[d - 1]) > kBlockTol)
    throw InvalidBlock("last coordinate must be zero at state " + std::to_string(s));
  Vector weights(d);
  double prev = 0.0;
  for (Index j = 0; j + 1 < d; ++j) {
    const double c = block[j] / std::sqrt(support.gap(s, j));
    if (c < prev - kBlockTol || c > 1.0 + kBlockTol)
      throw InvalidBlock("cumulative masses not monotone in [0,1] at state " +
                         std::to_string(s));
    weights[j] = c - prev;
    prev = c;
  }
  weights[d - 1] = 1.0 - prev;
  return weights;
}

void project_categorical_into(const Vector& grid, double location, double mass, Vector& out) {
  const Index d = grid.size();
  if (location <= grid[0]) {
    out[0] += mass;
    return;
  }
  if (location >= grid[d - 1]) {
    out[d - 1] += mass;
    return;
  }
  // grid[j] <= location < grid[j+1]
  const double* begin = grid.data();
  const Index j = std::upper_bound(begin, begin + d, location) - begin - 1;
  if (location == grid[j]) {
    out[j] += mass;  // on-node tie rule: no split
    return;
  }
  const double gap = grid[j + 1] - grid[j];
  const double hi_frac = (location - grid[j]) / gap;
  out[j] += mass * (1.0 - hi_frac);
  out[j + 1] += mass * hi_frac;
}

Vector project_categorical(std::span<const double> locations, std::span<const double> masses,
                           const ScalarSupport& support, Index s) {
  if (support.dim(s) < 1) throw EmptySupport("state " + std::to_string(s));
  Vector out = Vector::Zero(support.dim(s));
  for (std::size_t i = 0; i < locations.size(); ++i)
    project_categorical_into(support.atoms[s], locations[i], masses[i], out);
  return out;
}

Vector sampled_target_ctd(const BlockField& iterate, Index s, double r, Index s_next,
                          double gamma, const ScalarSupport& support) {
  const Vector weights = unembed_ctd(iterate[s_next], support, s_next);
  const Vector& source = support.atoms[s_next];
  Vector projected = Vector::Zero(support.dim(s));
  for (Index i = 0; i < source.size(); ++i)
    project_categorical_into(support.atoms[s], r + gamma * source[i], weights[i], projected);
  return embed_ctd(projected, support, s);
}

WeightField projected_bellman_ctd(const WeightField& eta, const FiniteMdp& mdp,
                                  const Policy& policy, const ScalarSupport& support) {
  const double gamma = mdp.discount.value();
  WeightField out(eta.size());
  for (Index s = 0; s < mdp.n_states; ++s) {
    Vector acc = Vector::Zero(support.dim(s));
    for (Index a = 0; a < mdp.n_actions; ++a) {
      const double pa = policy.probs(s, a);
      if (pa == 0.0) continue;
      const double r = mdp.reward_at(s, a)[0];
      for (Index sn = 0; sn < mdp.n_states; ++sn) {
        const double w = pa * mdp.transition[a](s, sn);
        if (w == 0.0) continue;
        const Vector& source = support.atoms[sn];
        for (Index i = 0; i < source.size(); ++i)
          project_categorical_into(support.atoms[s], r + gamma * source[i],
                                   w * eta[sn][i], acc);
      }
    }
    out[s] = std::move(acc);
  }
  return out;
}

double sup_cramer(const WeightField& a, const WeightField& b, const ScalarSupport& support) {
  double worst = 0.0;
  for (Index s = 0; s < support.n_states(); ++s)
    worst = std::max(worst, cramer_distance(a[s], b[s], support, s));
  return worst;
}

WeightField uniform_field(const ScalarSupport& support) {
  WeightField eta(support.atoms.size());
  for (Index s = 0; s < support.n_states(); ++s)
    eta[s] = Vector::Constant(support.dim(s), 1.0 / static_cast<double>(support.dim(s)));
  return eta;
}

BlockField embed_field_ctd(const WeightField& eta, const ScalarSupport& support) {
  BlockField blocks(eta.size());
  for (Index s = 0; s < support.n_states(); ++s) blocks[s] = embed_ctd(eta[s], support, s);
  return blocks;
}

WeightField unembed_field_ctd(const BlockField& blocks, const ScalarSupport& support) {
  WeightField eta(blocks.size());
  for (Index s = 0; s < support.n_states(); ++s)
    eta[s] = unembed_ctd(blocks[s], support, s);
  return eta;
}

std::pair<WeightField, int> fixed_point_ctd(const FiniteMdp& mdp, const Policy& policy,
                                            const ScalarSupport& support, double tol) {
  const double beta = std::sqrt(mdp.discount.value());
  WeightField eta = uniform_field(support);
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    WeightField next = projected_bellman_ctd(eta, mdp, policy, support);
    const double change = sup_cramer(next, eta, support);
    eta = std::move(next);
    if (change <= tol * (1.0 - beta)) return {std::move(eta), sweep};
  }
  throw ConvergenceFailure("projected operator iteration exceeded sweep cap");
}

}  // namespace distlab
