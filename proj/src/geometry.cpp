#include "distlab/geometry.hpp"

#include <cmath>

namespace distlab {

namespace {

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

}  // namespace

Index geometry_states(const Geometry& g) {
  return std::visit([](const auto& geo) { return geo.support.n_states(); }, g);
}

Index geometry_dim(const Geometry& g, Index s) {
  return std::visit([s](const auto& geo) { return geo.support.dim(s); }, g);
}

double contraction_modulus(const Geometry& g, double gamma) {
  return std::visit(
      Overload{[&](const CramerGeometry&) { return std::sqrt(gamma); },
               [&](const MmdGeometry& geo) {
                 return std::pow(gamma, geo.support.kernel.c / 2.0);
               }},
      g);
}

double state_metric(const Geometry& g, Index s, const Vector& w1, const Vector& w2) {
  return std::visit(
      Overload{[&](const CramerGeometry& geo) {
                 return cramer_distance(w1, w2, geo.support, s);
               },
               [&](const MmdGeometry& geo) {
                 return mmd_distance(w1, w2, geo.support.gram[s]);
               }},
      g);
}

double sup_metric(const Geometry& g, const WeightField& a, const WeightField& b) {
  double worst = 0.0;
  for (Index s = 0; s < geometry_states(g); ++s)
    worst = std::max(worst, state_metric(g, s, a[s], b[s]));
  return worst;
}

Vector embed_state(const Geometry& g, Index s, const Vector& weights) {
  return std::visit(
      Overload{[&](const CramerGeometry& geo) { return embed_ctd(weights, geo.support, s); },
               [&](const MmdGeometry& geo) {
                 return embed_mtd(weights, geo.support.gram[s]);
               }},
      g);
}

Vector unembed_state(const Geometry& g, Index s, const Vector& block) {
  return std::visit(
      Overload{[&](const CramerGeometry& geo) { return unembed_ctd(block, geo.support, s); },
               [&](const MmdGeometry& geo) {
                 return unembed_mtd(block, geo.support.gram[s]);
               }},
      g);
}

BlockField embed_field(const Geometry& g, const WeightField& eta) {
  BlockField blocks(eta.size());
  for (Index s = 0; s < geometry_states(g); ++s) blocks[s] = embed_state(g, s, eta[s]);
  return blocks;
}

WeightField unembed_field(const Geometry& g, const BlockField& blocks) {
  WeightField eta(blocks.size());
  for (Index s = 0; s < geometry_states(g); ++s) eta[s] = unembed_state(g, s, blocks[s]);
  return eta;
}

Vector project_state(const Geometry& g, Index s, const Matrix& points, const Vector& masses) {
  return std::visit(
      Overload{[&](const CramerGeometry& geo) {
                 if (points.cols() != 1)
                   throw DimensionMismatch("scalar geometry expects one-column points");
                 return project_categorical(
                     std::span<const double>(points.data(), points.rows()),
                     std::span<const double>(masses.data(), masses.size()), geo.support, s);
               },
               [&](const MmdGeometry& geo) {
                 return project_signed(points, masses, geo.support, s);
               }},
      g);
}

Vector sampled_target(const Geometry& g, const BlockField& iterate, Index s, const Vector& r,
                      Index s_next, double gamma) {
  return std::visit(Overload{[&](const CramerGeometry& geo) {
                               return sampled_target_ctd(iterate, s, r[0], s_next, gamma,
                                                         geo.support);
                             },
                             [&](const MmdGeometry& geo) {
                               return sampled_target_mtd(iterate, s, r, s_next, gamma,
                                                         geo.support);
                             }},
                    g);
}

WeightField apply_projected_bellman(const Geometry& g, const FiniteMdp& mdp,
                                    const Policy& policy, const WeightField& eta) {
  return std::visit(Overload{[&](const CramerGeometry& geo) {
                               return projected_bellman_ctd(eta, mdp, policy, geo.support);
                             },
                             [&](const MmdGeometry& geo) {
                               return projected_bellman_mtd(eta, mdp, policy, geo.support);
                             }},
                    g);
}

std::pair<WeightField, int> fixed_point(const Geometry& g, const FiniteMdp& mdp,
                                        const Policy& policy, double tol) {
  return std::visit(Overload{[&](const CramerGeometry& geo) {
                               return fixed_point_ctd(mdp, policy, geo.support, tol);
                             },
                             [&](const MmdGeometry& geo) {
                               return fixed_point_mtd(mdp, policy, geo.support, tol);
                             }},
                    g);
}

WeightField first_atom_field(const Geometry& g) {
  WeightField eta(geometry_states(g));
  for (Index s = 0; s < geometry_states(g); ++s) {
    eta[s] = Vector::Zero(geometry_dim(g, s));
    eta[s][0] = 1.0;
  }
  return eta;
}

}  // namespace distlab
