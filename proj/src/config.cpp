#include "distlab/config.hpp"

#include <fstream>

namespace distlab {

namespace {

using nlohmann::json;

const json& require(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ConfigError("missing key '" + key + "'");
  return doc.at(key);
}

Vector parse_vector(const json& arr, const std::string& key) {
  if (!arr.is_array()) throw ConfigError("'" + key + "' must be an array");
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw ConfigError("'" + key + "[" + std::to_string(i) + "]' must be a number");
    v[static_cast<Index>(i)] = arr[i].get<double>();
  }
  return v;
}

Matrix parse_matrix(const json& arr, const std::string& key) {
  if (!arr.is_array() || arr.empty())
    throw ConfigError("'" + key + "' must be a non-empty array of rows");
  const std::size_t cols = arr[0].size();
  Matrix m(arr.size(), cols);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Vector row = parse_vector(arr[i], key + "[" + std::to_string(i) + "]");
    if (static_cast<std::size_t>(row.size()) != cols)
      throw ConfigError("'" + key + "' rows have inconsistent lengths");
    m.row(static_cast<Index>(i)) = row.transpose();
  }
  return m;
}

StepSchedule parse_schedule(const json& doc) {
  const std::string type = require(doc, "type").get<std::string>();
  const double alpha = require(doc, "alpha").get<double>();
  if (type == "constant") return ConstantStep{alpha};
  if (type == "linear") return LinearStep{alpha, require(doc, "offset").get<double>()};
  if (type == "poly")
    return PolyStep{alpha, require(doc, "offset").get<double>(),
                    require(doc, "z").get<double>()};
  throw ConfigError("experiment.schedule.type must be constant, linear, or poly");
}

}  // namespace

std::string config_hash_hex(const nlohmann::json& doc) {
  const std::string dump = doc.dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char ch : dump) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buffer);
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
  ExperimentConfig config;
  config.raw = doc;
  config.config_hash = config_hash_hex(doc);

  config.mdp.n_states = require(doc, "states").get<Index>();
  config.mdp.n_actions = require(doc, "actions").get<Index>();
  config.mdp.reward_dim = doc.value("reward_dim", 1);

  const json& transition = require(doc, "transition");
  if (!transition.is_array() ||
      transition.size() != static_cast<std::size_t>(config.mdp.n_states))
    throw ConfigError("'transition' must hold one block per state");
  config.mdp.transition.assign(config.mdp.n_actions,
                               Matrix::Zero(config.mdp.n_states, config.mdp.n_states));
  for (Index s = 0; s < config.mdp.n_states; ++s) {
    const json& per_action = transition[static_cast<std::size_t>(s)];
    if (per_action.size() != static_cast<std::size_t>(config.mdp.n_actions))
      throw ConfigError("'transition[" + std::to_string(s) +
                        "]' must hold one row per action");
    for (Index a = 0; a < config.mdp.n_actions; ++a) {
      const Vector row =
          parse_vector(per_action[static_cast<std::size_t>(a)],
                       "transition[" + std::to_string(s) + "][" + std::to_string(a) + "]");
      if (row.size() != config.mdp.n_states)
        throw ConfigError("transition row (s=" + std::to_string(s) + ", a=" +
                          std::to_string(a) + ") has wrong length");
      config.mdp.transition[a].row(s) = row.transpose();
    }
  }

  const json& reward = require(doc, "reward");
  config.mdp.reward.resize(config.mdp.n_states * config.mdp.n_actions,
                           config.mdp.reward_dim);
  if (reward.size() != static_cast<std::size_t>(config.mdp.n_states))
    throw ConfigError("'reward' must hold one entry per state");
  for (Index s = 0; s < config.mdp.n_states; ++s) {
    const json& per_action = reward[static_cast<std::size_t>(s)];
    if (per_action.size() != static_cast<std::size_t>(config.mdp.n_actions))
      throw ConfigError("'reward[" + std::to_string(s) + "]' must hold one entry per action");
    for (Index a = 0; a < config.mdp.n_actions; ++a) {
      const json& cell = per_action[static_cast<std::size_t>(a)];
      const std::string key = "reward[" + std::to_string(s) + "][" + std::to_string(a) + "]";
      Vector r;
      if (cell.is_number())
        r = Vector::Constant(1, cell.get<double>());
      else
        r = parse_vector(cell, key);
      if (r.size() != config.mdp.reward_dim)
        throw ConfigError("'" + key + "' must have reward_dim entries");
      config.mdp.reward.row(s * config.mdp.n_actions + a) = r.transpose();
    }
  }

  if (doc.contains("discount")) config.mdp.discount = doc.at("discount").get<double>();
  config.mdp.validate();

  config.policy.probs = parse_matrix(require(doc, "policy"), "policy");
  config.policy.validate(config.mdp);

  if (doc.contains("support")) {
    const json& support = doc.at("support");
    if (support.contains("scalar")) {
      std::vector<Vector> atoms;
      for (std::size_t s = 0; s < support.at("scalar").size(); ++s)
        atoms.push_back(parse_vector(support.at("scalar")[s],
                                     "support.scalar[" + std::to_string(s) + "]"));
      if (atoms.size() != static_cast<std::size_t>(config.mdp.n_states))
        throw ConfigError("'support.scalar' must hold one atom list per state");
      config.scalar_support = std::move(atoms);
    }
    if (support.contains("multivariate")) {
      std::vector<Matrix> atoms;
      for (std::size_t s = 0; s < support.at("multivariate").size(); ++s)
        atoms.push_back(parse_matrix(support.at("multivariate")[s],
                                     "support.multivariate[" + std::to_string(s) + "]"));
      if (atoms.size() != static_cast<std::size_t>(config.mdp.n_states))
        throw ConfigError("'support.multivariate' must hold one atom list per state");
      config.multi_support = std::move(atoms);
    }
    if (support.contains("scalar_layers")) {
      std::vector<std::vector<Vector>> layers;
      for (std::size_t h = 0; h < support.at("scalar_layers").size(); ++h) {
        std::vector<Vector> layer;
        for (std::size_t s = 0; s < support.at("scalar_layers")[h].size(); ++s)
          layer.push_back(parse_vector(
              support.at("scalar_layers")[h][s],
              "support.scalar_layers[" + std::to_string(h) + "][" + std::to_string(s) + "]"));
        layers.push_back(std::move(layer));
      }
      config.scalar_layers = std::move(layers);
    }
  }
  if (doc.contains("kernel")) config.kernel_c = doc.at("kernel").value("c", 1.0);
  if (config.kernel_c <= 0.0 || config.kernel_c >= 2.0)
    throw ConfigError("'kernel.c' must lie in (0,2)");

  if (doc.contains("experiment")) {
    const json& exp = doc.at("experiment");
    config.method = exp.value("method", "ctd");
    if (config.method != "ctd" && config.method != "mtd")
      throw ConfigError("'experiment.method' must be ctd or mtd");
    config.regime = exp.value("regime", "iid");
    if (config.regime != "iid" && config.regime != "markov" && config.regime != "episodic")
      throw ConfigError("'experiment.regime' must be iid, markov, or episodic");
    if (exp.contains("schedule")) config.schedule = parse_schedule(exp.at("schedule"));
    config.steps = exp.value("steps", config.steps);
    config.episodes = exp.value("episodes", config.episodes);
    config.horizon = exp.value("horizon", config.horizon);
    config.lambda = exp.value("lambda", config.lambda);
    config.replications = exp.value("replications", config.replications);
    config.seed = exp.value("seed", config.seed);
    config.fixed_point_tol = exp.value("fixed_point_tol", config.fixed_point_tol);
    config.mixing_k_max = exp.value("mixing_k_max", config.mixing_k_max);
    if (exp.contains("theta")) config.theta = exp.at("theta").get<double>();
    if (exp.contains("upsilon")) config.upsilon = exp.at("upsilon").get<double>();
    if (exp.contains("checkpoints")) {
      for (const auto& v : exp.at("checkpoints"))
        config.checkpoints.push_back(v.get<std::int64_t>());
    }
    if (exp.contains("iid_law"))
      config.iid_law = parse_vector(exp.at("iid_law"), "experiment.iid_law");
    if (exp.contains("init_state"))
      config.init_state = exp.at("init_state").get<Index>();
    if (exp.contains("nu0")) config.nu0 = parse_vector(exp.at("nu0"), "experiment.nu0");
  }

  // Cross-field validity.
  if (config.regime == "episodic") {
    if (config.horizon < 1) throw ConfigError("episodic runs need 'experiment.horizon' >= 1");
    if (config.nu0.size() == 0)
      config.nu0 = Vector::Constant(config.mdp.n_states,
                                    1.0 / static_cast<double>(config.mdp.n_states));
    if (config.nu0.size() != config.mdp.n_states)
      throw ConfigError("'experiment.nu0' must have one entry per state");
  } else {
    if (!config.mdp.discount)
      throw ConfigError("regime '" + config.regime + "' needs the 'discount' key");
  }
  if (config.regime == "iid" && config.iid_law.size() == 0)
    config.iid_law = Vector::Constant(config.mdp.n_states,
                                      1.0 / static_cast<double>(config.mdp.n_states));
  if (config.method == "ctd" && config.mdp.reward_dim != 1)
    throw ConfigError("method ctd needs scalar rewards (reward_dim = 1)");
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

Geometry build_geometry(const ExperimentConfig& config) {
  if (config.method == "ctd") {
    if (!config.scalar_support)
      throw ConfigError("method ctd needs 'support.scalar'");
    ScalarSupport support;
    support.atoms = *config.scalar_support;
    support.validate();
    return CramerGeometry{std::move(support)};
  }
  if (config.multi_support) {
    MultiSupport support;
    support.atoms = *config.multi_support;
    support.kernel.c = config.kernel_c;
    support.build_gram();
    return MmdGeometry{std::move(support)};
  }
  if (config.scalar_support) {
    if (config.mdp.reward_dim != 1)
      throw ConfigError("scalar support with mtd needs reward_dim = 1");
    return MmdGeometry{MultiSupport::from_scalar(*config.scalar_support, config.kernel_c)};
  }
  throw ConfigError("method mtd needs 'support.multivariate' (or 'support.scalar' when q=1)");
}

HorizonGeometry build_horizon_geometry(const ExperimentConfig& config) {
  HorizonGeometry geometry;
  for (int h = 1; h <= config.horizon; ++h) {
    std::vector<Vector> layer_atoms;
    if (config.scalar_layers) {
      if (config.scalar_layers->size() != static_cast<std::size_t>(config.horizon))
        throw ConfigError("'support.scalar_layers' must hold one layer per horizon");
      layer_atoms = (*config.scalar_layers)[static_cast<std::size_t>(h - 1)];
    } else if (config.scalar_support) {
      layer_atoms = *config.scalar_support;
    } else {
      throw ConfigError("episodic runs need 'support.scalar' or 'support.scalar_layers'");
    }
    if (config.method == "ctd") {
      ScalarSupport support;
      support.atoms = std::move(layer_atoms);
      support.validate();
      geometry.layers.emplace_back(CramerGeometry{std::move(support)});
    } else {
      geometry.layers.emplace_back(
          MmdGeometry{MultiSupport::from_scalar(layer_atoms, config.kernel_c)});
    }
  }
  return geometry;
}

SamplingRegime build_regime(const ExperimentConfig& config) {
  if (config.regime == "iid") return IidRegime{config.iid_law};
  if (config.regime == "markov") {
    if (config.init_state) return MarkovRegime{*config.init_state};
    return MarkovRegime{Index{0}};
  }
  return EpisodicRegime{config.nu0, config.horizon};
}

}  // namespace distlab
