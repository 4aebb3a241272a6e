#include "distlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

namespace distlab {
namespace oracle {

namespace {

bool lex_less(const Eigen::Ref<const Eigen::RowVectorXd>& a,
              const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

AtomicLaw weights_to_law(const Geometry& geometry, Index s, const Vector& weights) {
  AtomicLaw law;
  std::visit(
      [&](const auto& geo) {
        using G = std::decay_t<decltype(geo)>;
        if constexpr (std::is_same_v<G, CramerGeometry>) {
          law.points.resize(geo.support.dim(s), 1);
          law.points.col(0) = geo.support.atoms[s];
        } else {
          law.points = geo.support.atoms[s];
        }
      },
      geometry);
  law.masses = weights;
  return law;
}

double metric_atomic(const Geometry& geometry, const AtomicLaw& a, const AtomicLaw& b) {
  if (std::holds_alternative<CramerGeometry>(geometry)) return cramer_atomic(a, b);
  return mmd_atomic(a, b, std::get<MmdGeometry>(geometry).support.kernel);
}

}  // namespace

AtomicLaw AtomicLaw::delta(const Vector& point) {
  AtomicLaw law;
  law.points = point.transpose();
  law.masses = Vector::Ones(1);
  return law;
}

AtomicLaw AtomicLaw::delta_scalar(double point) {
  return delta(Vector::Constant(1, point));
}

AtomicLaw merge_atoms(const AtomicLaw& law) {
  const Index n = law.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index i, Index j) {
    return lex_less(law.points.row(i), law.points.row(j));
  });
  AtomicLaw merged;
  merged.points.resize(n, law.point_dim());
  merged.masses.resize(n);
  Index out = -1;
  for (Index idx : order) {
    if (out >= 0 && merged.points.row(out) == law.points.row(idx)) {
      merged.masses[out] += law.masses[idx];
    } else {
      ++out;
      merged.points.row(out) = law.points.row(idx);
      merged.masses[out] = law.masses[idx];
    }
  }
  merged.points.conservativeResize(out + 1, Eigen::NoChange);
  merged.masses.conservativeResize(out + 1);
  return merged;
}

AtomicLaw pushforward(const AtomicLaw& law, const Vector& shift, double scale) {
  AtomicLaw out;
  out.points = (scale * law.points).rowwise() + shift.transpose();
  out.masses = law.masses;
  return out;
}

AtomicLaw mixture(const std::vector<AtomicLaw>& laws, const Vector& weights) {
  Index total = 0;
  for (const AtomicLaw& law : laws) total += law.size();
  AtomicLaw mixed;
  mixed.points.resize(total, laws.front().point_dim());
  mixed.masses.resize(total);
  Index offset = 0;
  for (std::size_t i = 0; i < laws.size(); ++i) {
    mixed.points.middleRows(offset, laws[i].size()) = laws[i].points;
    mixed.masses.segment(offset, laws[i].size()) = weights[i] * laws[i].masses;
    offset += laws[i].size();
  }
  return merge_atoms(mixed);
}

double cramer_atomic(const AtomicLaw& a, const AtomicLaw& b) {
  if (a.point_dim() != 1 || b.point_dim() != 1)
    throw DimensionMismatch("cramer_atomic expects scalar laws");
  std::vector<std::pair<double, std::pair<double, double>>> jumps;
  jumps.reserve(a.size() + b.size());
  for (Index i = 0; i < a.size(); ++i)
    jumps.push_back({a.points(i, 0), {a.masses[i], 0.0}});
  for (Index i = 0; i < b.size(); ++i)
    jumps.push_back({b.points(i, 0), {0.0, b.masses[i]}});
  std::sort(jumps.begin(), jumps.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  double integral = 0.0;
  double fa = 0.0, fb = 0.0;
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    fa += jumps[i].second.first;
    fb += jumps[i].second.second;
    if (i + 1 < jumps.size() && jumps[i + 1].first > jumps[i].first) {
      const double diff = fa - fb;
      integral += diff * diff * (jumps[i + 1].first - jumps[i].first);
    }
  }
  return std::sqrt(std::max(integral, 0.0));
}

double mmd_atomic(const AtomicLaw& a, const AtomicLaw& b, const EnergyKernel& kernel) {
  double sq = 0.0;
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = 0; j < a.size(); ++j)
      sq += a.masses[i] * a.masses[j] *
            kernel(a.points.row(i).transpose(), a.points.row(j).transpose());
  for (Index i = 0; i < b.size(); ++i)
    for (Index j = 0; j < b.size(); ++j)
      sq += b.masses[i] * b.masses[j] *
            kernel(b.points.row(i).transpose(), b.points.row(j).transpose());
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = 0; j < b.size(); ++j)
      sq -= 2.0 * a.masses[i] * b.masses[j] *
            kernel(a.points.row(i).transpose(), b.points.row(j).transpose());
  return std::sqrt(std::max(sq, 0.0));
}

std::vector<std::vector<AtomicLaw>> exact_return_distribution_fh(const FiniteMdp& mdp,
                                                                 const Policy& policy,
                                                                 int horizon,
                                                                 std::int64_t atom_budget) {
  std::vector<std::vector<AtomicLaw>> laws(horizon + 1);
  const Vector origin = Vector::Zero(mdp.reward_dim);
  laws[0].assign(mdp.n_states, AtomicLaw::delta(origin));
  for (int h = 1; h <= horizon; ++h) {
    laws[h].resize(mdp.n_states);
    for (Index s = 0; s < mdp.n_states; ++s) {
      std::vector<AtomicLaw> parts;
      std::vector<double> part_weights;
      for (Index a = 0; a < mdp.n_actions; ++a) {
        const double pa = policy.probs(s, a);
        if (pa == 0.0) continue;
        const Vector r = mdp.reward_at(s, a).transpose();
        for (Index sn = 0; sn < mdp.n_states; ++sn) {
          const double w = pa * mdp.transition[a](s, sn);
          if (w == 0.0) continue;
          parts.push_back(pushforward(laws[h - 1][sn], r, 1.0));
          part_weights.push_back(w);
        }
      }
      laws[h][s] = mixture(parts, Eigen::Map<const Vector>(part_weights.data(),
                                                           part_weights.size()));
      if (laws[h][s].size() > atom_budget)
        throw AtomBudgetExceeded("layer " + std::to_string(h) + " state " +
                                 std::to_string(s) + " holds " +
                                 std::to_string(laws[h][s].size()) + " atoms");
    }
  }
  return laws;
}

FineGridResult fine_grid_oracle_discounted(const FiniteMdp& mdp, const Policy& policy,
                                           double resolution, double tol) {
  if (mdp.reward_dim != 1)
    throw DimensionMismatch("fine-grid oracle handles scalar rewards only");
  const double gamma = mdp.discount.value();
  const double beta = std::sqrt(gamma);
  const double r_max = mdp.reward.maxCoeff();
  const double hi = r_max / (1.0 - gamma);

  FineGridResult result;
  const auto count =
      hi > 0.0 ? static_cast<Index>(std::ceil(hi / resolution)) + 1 : Index{1};
  result.grid = ScalarSupport::uniform(mdp.n_states, 0.0, std::max(hi, 0.0), count);
  result.gap = count > 1 ? hi / static_cast<double>(count - 1) : 0.0;
  result.sq_step_bound = result.gap / 4.0;

  WeightField eta = uniform_field(result.grid);
  double change = std::numeric_limits<double>::infinity();
  int iterations = 0;
  while (change / (1.0 - beta) > tol) {
    WeightField next = projected_bellman_ctd(eta, mdp, policy, result.grid);
    change = sup_cramer(next, eta, result.grid);
    eta = std::move(next);
    if (++iterations > 100000)
      throw ConvergenceFailure("fine-grid oracle iteration exceeded sweep cap");
  }
  result.weights = eta;
  result.iterations = iterations;
  result.iter_tail = change / (1.0 - beta);

  // Exact Cramer projection error of one more operator application.
  const Geometry grid_geometry{CramerGeometry{result.grid}};
  double step_error = 0.0;
  for (Index s = 0; s < mdp.n_states; ++s) {
    std::vector<AtomicLaw> parts;
    std::vector<double> part_weights;
    for (Index a = 0; a < mdp.n_actions; ++a) {
      const double pa = policy.probs(s, a);
      if (pa == 0.0) continue;
      const Vector r = mdp.reward_at(s, a).transpose();
      for (Index sn = 0; sn < mdp.n_states; ++sn) {
        const double w = pa * mdp.transition[a](s, sn);
        if (w == 0.0) continue;
        AtomicLaw part = weights_to_law(grid_geometry, sn, eta[sn]);
        parts.push_back(pushforward(part, r, gamma));
        part_weights.push_back(w);
      }
    }
    const AtomicLaw pre = mixture(
        parts, Eigen::Map<const Vector>(part_weights.data(), part_weights.size()));
    const Vector projected =
        project_categorical(std::span<const double>(pre.points.data(), pre.size()),
                            std::span<const double>(pre.masses.data(), pre.size()),
                            result.grid, s);
    const AtomicLaw post = weights_to_law(grid_geometry, s, projected);
    step_error = std::max(step_error, cramer_atomic(pre, post));
  }
  result.step_error = step_error;
  result.certified_error = step_error / (1.0 - beta) + result.iter_tail;

  result.laws.reserve(mdp.n_states);
  for (Index s = 0; s < mdp.n_states; ++s)
    result.laws.push_back(weights_to_law(grid_geometry, s, eta[s]));
  return result;
}

ReprReport representation_error(const std::vector<AtomicLaw>& eta_pi, const Geometry& geometry,
                                const WeightField& eta_star, double beta,
                                double oracle_slack) {
  ReprReport report;
  report.oracle_slack = oracle_slack;
  report.per_state_eps.resize(eta_pi.size());
  for (Index s = 0; s < static_cast<Index>(eta_pi.size()); ++s) {
    const Vector projected =
        project_state(geometry, s, eta_pi[s].points, eta_pi[s].masses);
    const AtomicLaw projected_law = weights_to_law(geometry, s, projected);
    report.per_state_eps[s] = metric_atomic(geometry, projected_law, eta_pi[s]);
    report.eps_repr = std::max(report.eps_repr, report.per_state_eps[s]);
    const AtomicLaw star_law = weights_to_law(geometry, s, eta_star[s]);
    report.lhs = std::max(report.lhs, metric_atomic(geometry, star_law, eta_pi[s]));
  }
  report.bound = report.eps_repr / (1.0 - beta);
  report.inequality_holds = report.lhs <= report.bound + oracle_slack + 1e-12;
  return report;
}

ReprReport representation_error_fh(const std::vector<std::vector<AtomicLaw>>& eta_pi,
                                   const HorizonGeometry& geometry, const HorizonField& eta_star,
                                   double lambda) {
  ReprReport report;
  double weight = 1.0;
  for (int h = 1; h <= geometry.horizon(); ++h) {
    weight *= lambda;
    const Geometry& g = geometry.layers[h - 1];
    for (Index s = 0; s < geometry.n_states(); ++s) {
      const AtomicLaw& truth = eta_pi[h][s];
      const Vector projected = project_state(g, s, truth.points, truth.masses);
      const AtomicLaw projected_law = weights_to_law(g, s, projected);
      const double eps = weight * metric_atomic(g, projected_law, truth);
      report.per_state_eps.push_back(eps);
      report.eps_repr = std::max(report.eps_repr, eps);
      const AtomicLaw star_law = weights_to_law(g, s, eta_star.layers[h - 1][s]);
      report.lhs = std::max(report.lhs, weight * metric_atomic(g, star_law, truth));
    }
  }
  report.bound = report.eps_repr / (1.0 - lambda);
  report.oracle_slack = 0.0;
  report.inequality_holds = report.lhs <= report.bound + 1e-12;
  return report;
}

namespace {

/// Quadratic form of the squared metric to a fixed target:
/// obj(p) = p' Q p - 2 g' p + c0.
struct QuadraticObjective {
  Matrix Q;
  Vector g;
  double c0 = 0.0;

  double operator()(const Vector& p) const { return p.dot(Q * p) - 2.0 * g.dot(p) + c0; }
};

QuadraticObjective cramer_objective(const Vector& grid, const Matrix& points,
                                    const Vector& masses) {
  // Breakpoints are the union of grid nodes and target atoms; on each cell
  // both CDFs are constant, so the squared distance is quadratic in the grid
  // weights through the indicator matrix L (L p = grid CDF at breakpoints).
  std::vector<double> breaks(grid.data(), grid.data() + grid.size());
  for (Index i = 0; i < points.rows(); ++i) breaks.push_back(points(i, 0));
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const auto m = static_cast<Index>(breaks.size());

  Matrix L = Matrix::Zero(m, grid.size());
  Vector v = Vector::Zero(m);
  Vector w = Vector::Zero(m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < grid.size(); ++j)
      if (grid[j] <= breaks[static_cast<std::size_t>(i)]) L(i, j) = 1.0;
    for (Index j = 0; j < points.rows(); ++j)
      if (points(j, 0) <= breaks[static_cast<std::size_t>(i)]) v[i] += masses[j];
    if (i + 1 < m)
      w[i] = breaks[static_cast<std::size_t>(i) + 1] - breaks[static_cast<std::size_t>(i)];
  }
  QuadraticObjective obj;
  obj.Q = L.transpose() * w.asDiagonal() * L;
  obj.g = L.transpose() * w.asDiagonal() * v;
  obj.c0 = v.dot(w.asDiagonal() * v);
  return obj;
}

QuadraticObjective mmd_objective(const MmdGeometry& geometry, Index s, const Matrix& points,
                                 const Vector& masses) {
  const Matrix& grid = geometry.support.atoms[s];
  QuadraticObjective obj;
  obj.Q = geometry.support.gram[s].kernel_matrix;
  obj.g = Vector::Zero(grid.rows());
  for (Index i = 0; i < grid.rows(); ++i)
    for (Index j = 0; j < points.rows(); ++j)
      obj.g[i] += masses[j] * geometry.support.kernel(grid.row(i).transpose(),
                                                      points.row(j).transpose());
  obj.c0 = 0.0;  // constant in p: irrelevant to the argmin
  return obj;
}

}  // namespace

Vector brute_force_projection_oracle(const Matrix& points, const Vector& masses,
                                     const Geometry& geometry, Index s, double resolution) {
  const Index d = geometry_dim(geometry, s);
  if (d > 4) throw OracleScaleExceeded("oracle handles at most 4 atoms, got " +
                                       std::to_string(d));

  Vector best;
  double best_value = std::numeric_limits<double>::infinity();
  const auto consider = [&](const QuadraticObjective& obj, const Vector& p) {
    const double value = obj(p);
    if (value < best_value) {
      best_value = value;
      best = p;
    }
  };

  if (const auto* cg = std::get_if<CramerGeometry>(&geometry)) {
    const QuadraticObjective obj = cramer_objective(cg->support.atoms[s], points, masses);
    // Dense scan of the probability simplex at the given resolution.
    const auto steps = static_cast<long>(std::llround(1.0 / resolution));
    Vector p(d);
    std::vector<long> counts(static_cast<std::size_t>(d), 0);
    const std::function<void(Index, long)> recurse = [&](Index coord, long remaining) {
      if (coord == d - 1) {
        counts[static_cast<std::size_t>(coord)] = remaining;
        for (Index i = 0; i < d; ++i)
          p[i] = static_cast<double>(counts[static_cast<std::size_t>(i)]) /
                 static_cast<double>(steps);
        consider(obj, p);
        return;
      }
      for (long n = 0; n <= remaining; ++n) {
        counts[static_cast<std::size_t>(coord)] = n;
        recurse(coord + 1, remaining - n);
      }
    };
    recurse(0, steps);
    return best;
  }

  const auto& mg = std::get<MmdGeometry>(geometry);
  const QuadraticObjective obj = mmd_objective(mg, s, points, masses);
  // Dense scan of the [-2, 3]^d box intersected with the unit-mass plane.
  const double lo = -2.0, hi = 3.0;
  const auto steps = static_cast<long>(std::llround((hi - lo) / resolution));
  Vector p(d);
  const std::function<void(Index, double)> recurse = [&](Index coord, double mass_left) {
    if (coord == d - 1) {
      if (mass_left < lo - 1e-12 || mass_left > hi + 1e-12) return;
      p[coord] = mass_left;
      consider(obj, p);
      return;
    }
    for (long n = 0; n <= steps; ++n) {
      p[coord] = lo + resolution * static_cast<double>(n);
      recurse(coord + 1, mass_left - p[coord]);
    }
  };
  recurse(0, 1.0);
  return best;
}

}  // namespace oracle
}  // namespace distlab
