#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "distlab/fixed_horizon.hpp"
#include "distlab/geometry.hpp"
#include "distlab/sa.hpp"

namespace distlab {

/// Parsed experiment document. The document is a single JSON object with the
/// MDP keys at top level (states, actions, reward_dim, transition, reward,
/// discount, policy), supports under support.scalar / support.multivariate
/// (optionally per-layer under support.scalar_layers), the kernel exponent
/// under kernel.c, and runner settings under experiment.
struct ExperimentConfig {
  FiniteMdp mdp;
  Policy policy;

  std::optional<std::vector<Vector>> scalar_support;               // [s]
  std::optional<std::vector<Matrix>> multi_support;                // [s]
  std::optional<std::vector<std::vector<Vector>>> scalar_layers;   // [h][s]
  double kernel_c = 1.0;

  std::string method = "ctd";  // ctd | mtd
  std::string regime = "iid";  // iid | markov | episodic
  Vector iid_law;
  std::optional<Index> init_state;
  StepSchedule schedule = ConstantStep{0.1};
  std::int64_t steps = 10000;
  std::int64_t episodes = 1000;
  int horizon = 1;
  double lambda = 0.5;
  Vector nu0;
  int replications = 1;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> checkpoints;  // empty -> geometric
  double fixed_point_tol = 1e-11;
  std::optional<double> theta;    // smoothing override for the bound reports
  std::optional<double> upsilon;  // second-moment absorption override (mtd)
  int mixing_k_max = 64;

  std::string config_hash;
  nlohmann::json raw;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// FNV-1a hash of the canonical dump, hex-encoded; embedded in every output.
std::string config_hash_hex(const nlohmann::json& doc);

Geometry build_geometry(const ExperimentConfig& config);
HorizonGeometry build_horizon_geometry(const ExperimentConfig& config);
SamplingRegime build_regime(const ExperimentConfig& config);

}  // namespace distlab
