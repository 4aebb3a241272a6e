#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace distlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Per-state weight vectors (categorical or signed) and per-state embedded
// Euclidean blocks. Fields are indexed by state.
using WeightField = std::vector<Vector>;
using BlockField = std::vector<Vector>;

/// Deterministic random stream. Each replication owns its own stream;
/// identical seeds give identical draw sequences.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return dist_(engine_); }

  /// Inverse-CDF draw from a probability vector by cumulative scan.
  Index categorical(const Eigen::Ref<const Vector>& probs) {
    const double u = uniform01();
    double acc = 0.0;
    for (Index i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.size() - 1;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> dist_{0.0, 1.0};
};

/// splitmix64 hop; decorrelates per-replication seeds derived from one base.
inline std::uint64_t replication_seed(std::uint64_t base, std::uint64_t replication) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (replication + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace distlab
