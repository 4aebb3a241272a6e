#include "distlab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace distlab {

namespace {

// Structural adjacency: an edge exists iff the transition probability is
// nonzero exactly (zero entries are structural, not numeric).
std::vector<std::vector<Index>> adjacency(const Matrix& chain) {
  std::vector<std::vector<Index>> adj(chain.rows());
  for (Index s = 0; s < chain.rows(); ++s)
    for (Index t = 0; t < chain.cols(); ++t)
      if (chain(s, t) != 0.0) adj[s].push_back(t);
  return adj;
}

std::vector<int> scc_labels(const Matrix& chain, int& n_components) {
  // Iterative Tarjan.
  const Index n = chain.rows();
  auto adj = adjacency(chain);
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<Index> stack;
  int next_index = 0;
  n_components = 0;

  struct Frame {
    Index v;
    std::size_t child;
  };
  for (Index root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.child < adj[f.v].size()) {
        const Index w = adj[f.v][f.child++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          while (true) {
            const Index w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = n_components;
            if (w == f.v) break;
          }
          ++n_components;
        }
        const Index v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  return comp;
}

void require_irreducible_aperiodic(const Matrix& chain) {
  const int classes = count_recurrent_classes(chain);
  if (classes > 1)
    throw NotIrreducible("chain has " + std::to_string(classes) + " recurrent classes");
  if (!is_irreducible(chain))
    throw NotIrreducible("chain has transient states outside its recurrent class");
  const int period = chain_period(chain);
  if (period > 1) throw NotAperiodic("chain period is " + std::to_string(period));
}

double tv_distance(const Eigen::Ref<const Eigen::RowVectorXd>& p, const Vector& mu) {
  return 0.5 * (p.transpose() - mu).cwiseAbs().sum();
}

}  // namespace

bool is_irreducible(const Matrix& chain) {
  int n_components = 0;
  scc_labels(chain, n_components);
  return n_components == 1;
}

int count_recurrent_classes(const Matrix& chain) {
  int n_components = 0;
  const auto comp = scc_labels(chain, n_components);
  std::vector<char> closed(n_components, 1);
  for (Index s = 0; s < chain.rows(); ++s)
    for (Index t = 0; t < chain.cols(); ++t)
      if (chain(s, t) != 0.0 && comp[s] != comp[t]) closed[comp[s]] = 0;
  return static_cast<int>(std::count(closed.begin(), closed.end(), 1));
}

int chain_period(const Matrix& chain) {
  // BFS levels from state 0; for an irreducible chain the period is the gcd
  // of level[u] + 1 - level[v] over all structural edges (u, v).
  const Index n = chain.rows();
  auto adj = adjacency(chain);
  std::vector<long> level(n, -1);
  std::queue<Index> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const Index u = q.front();
    q.pop();
    for (Index v : adj[u])
      if (level[v] == -1) {
        level[v] = level[u] + 1;
        q.push(v);
      }
  }
  long g = 0;
  for (Index u = 0; u < n; ++u) {
    if (level[u] == -1) continue;
    for (Index v : adj[u])
      if (level[v] != -1) g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
  }
  return static_cast<int>(g == 0 ? 1 : g);
}

Vector stationary_distribution(const Matrix& chain) {
  require_irreducible_aperiodic(chain);
  const Index n = chain.rows();
  // (P^T - I) mu = 0 with the last equation replaced by sum(mu) = 1.
  Matrix A = chain.transpose() - Matrix::Identity(n, n);
  A.row(n - 1).setOnes();
  Vector b = Vector::Zero(n);
  b[n - 1] = 1.0;
  Vector mu = A.colPivHouseholderQr().solve(b);
  // Irreducibility guarantees positivity; clear roundoff dust.
  mu = mu.cwiseMax(0.0);
  mu /= mu.sum();
  return mu;
}

Vector stationary_distribution(const FiniteMdp& mdp, const Policy& policy) {
  return stationary_distribution(policy_transition(mdp, policy));
}

std::int64_t MixingProfile::t_delta(double delta) const {
  for (std::size_t k = 0; k < tv_curve.size(); ++k)
    if (tv_curve[k] <= delta) return static_cast<std::int64_t>(k);
  // Envelope extrapolation: first k with c_mix * sigma_mix^k <= delta.
  if (delta <= 0.0 || sigma_mix <= 0.0)
    throw ConvergenceFailure("mixing time request beyond tabulated range with delta <= 0");
  const double k = std::log(delta / c_mix) / std::log(sigma_mix);
  const auto k_env = static_cast<std::int64_t>(std::max(0.0, std::ceil(k)));
  return std::max<std::int64_t>(k_env, static_cast<std::int64_t>(tv_curve.size()));
}

MixingProfile mixing_profile(const Matrix& chain, int k_max) {
  require_irreducible_aperiodic(chain);
  MixingProfile profile;
  profile.stationary = stationary_distribution(chain);
  profile.mu_min = profile.stationary.minCoeff();

  // Second-largest eigenvalue modulus of the chain.
  Eigen::EigenSolver<Matrix> es(chain, /*computeEigenvectors=*/false);
  std::vector<double> moduli(chain.rows());
  for (Index i = 0; i < chain.rows(); ++i) moduli[i] = std::abs(es.eigenvalues()[i]);
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  const double slem = moduli.size() > 1 ? moduli[1] : 0.0;
  profile.sigma_mix = std::min(slem + 1e-9, 1.0 - 1e-12);

  profile.tv_curve.resize(static_cast<std::size_t>(k_max) + 1);
  Matrix power = Matrix::Identity(chain.rows(), chain.cols());
  for (int k = 0; k <= k_max; ++k) {
    double worst = 0.0;
    for (Index s = 0; s < chain.rows(); ++s)
      worst = std::max(worst, tv_distance(power.row(s), profile.stationary));
    profile.tv_curve[static_cast<std::size_t>(k)] = worst;
    if (k < k_max) power = power * chain;
  }

  double c = 1.0;
  for (int k = 0; k <= k_max; ++k)
    c = std::max(c, profile.tv_curve[static_cast<std::size_t>(k)] /
                        std::pow(profile.sigma_mix, k));
  profile.c_mix = c;
  return profile;
}

MixingProfile mixing_profile(const FiniteMdp& mdp, const Policy& policy, int k_max) {
  return mixing_profile(policy_transition(mdp, policy), k_max);
}

PhaseProfile phase_profile(const Matrix& chain, const Vector& nu0, int horizon) {
  PhaseProfile profile;
  profile.rho.resize(horizon, chain.rows());
  Eigen::RowVectorXd rho = nu0.transpose();
  for (int t = 0; t < horizon; ++t) {
    profile.rho.row(t) = rho;
    rho = rho * chain;
  }
  profile.rho_min = profile.rho.minCoeff();
  profile.full_support = profile.rho_min > 0.0;
  return profile;
}

PhaseProfile phase_profile(const FiniteMdp& mdp, const Policy& policy, const Vector& nu0,
                           int horizon) {
  return phase_profile(policy_transition(mdp, policy), nu0, horizon);
}

}  // namespace distlab
