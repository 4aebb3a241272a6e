#pragma once

#include <utility>
#include <variant>

#include "distlab/cramer.hpp"
#include "distlab/mmd.hpp"

namespace distlab {

struct CramerGeometry {
  ScalarSupport support;
};

struct MmdGeometry {
  MultiSupport support;
};

/// Statewise representation family: scalar categorical in the Cramer metric
/// or multivariate signed categorical in the MMD metric.
using Geometry = std::variant<CramerGeometry, MmdGeometry>;

Index geometry_states(const Geometry& g);
Index geometry_dim(const Geometry& g, Index s);

/// Contraction modulus of the embedded projected operator: sqrt(gamma) for
/// the Cramer geometry, gamma^(c/2) for the MMD geometry.
double contraction_modulus(const Geometry& g, double gamma);

double state_metric(const Geometry& g, Index s, const Vector& w1, const Vector& w2);
double sup_metric(const Geometry& g, const WeightField& a, const WeightField& b);

Vector embed_state(const Geometry& g, Index s, const Vector& weights);
Vector unembed_state(const Geometry& g, Index s, const Vector& block);
BlockField embed_field(const Geometry& g, const WeightField& eta);
WeightField unembed_field(const Geometry& g, const BlockField& blocks);

/// Projection of an atomic law (points x masses) onto the state-s support.
/// Points are rows of a matrix; the Cramer geometry requires one column.
Vector project_state(const Geometry& g, Index s, const Matrix& points, const Vector& masses);

/// One-sample embedded target at state s from a sampled (r, s') pair.
Vector sampled_target(const Geometry& g, const BlockField& iterate, Index s, const Vector& r,
                      Index s_next, double gamma);

WeightField apply_projected_bellman(const Geometry& g, const FiniteMdp& mdp,
                                    const Policy& policy, const WeightField& eta);

std::pair<WeightField, int> fixed_point(const Geometry& g, const FiniteMdp& mdp,
                                        const Policy& policy, double tol);

/// Point mass at the first atom of every state (the runners' default start).
WeightField first_atom_field(const Geometry& g);

}  // namespace distlab
