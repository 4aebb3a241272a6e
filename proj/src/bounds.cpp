#include "distlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace distlab {
namespace bounds {

namespace {

constexpr double kE = 2.718281828459045;

double n_ratio_of(Index block_count, int p) {
  return std::pow(static_cast<double>(block_count), 2.0 / p);
}

double smoothed_drift(double beta_bar, double theta, double n_ratio) {
  return 1.0 - beta_bar * std::sqrt((1.0 + theta * n_ratio) / (1.0 + theta));
}

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

}  // namespace

int pstar(Index block_count) {
  const double ln = std::log(static_cast<double>(block_count));
  return std::max(2, static_cast<int>(std::ceil(ln)));
}

double select_smoothing(double beta_bar, Index block_count) {
  const double n_ratio = n_ratio_of(block_count, pstar(block_count));
  const double floor = 0.5 * (1.0 - beta_bar);
  for (int j = 0; j <= 60; ++j) {
    const double theta = std::ldexp(1.0, -j);
    if (smoothed_drift(beta_bar, theta, n_ratio) >= floor) return theta;
  }
  throw SelectionFailed("no grid point gives positive smoothed drift (beta_bar = " +
                        std::to_string(beta_bar) + ")");
}

double IidConstants::linear_offset(double alpha) const {
  return std::max(1.0, alpha * a3 / a2);
}

double IidConstants::poly_offset(double alpha, double z) const {
  return std::max({1.0, std::pow(alpha * a3 / a2, 1.0 / z),
                   std::pow(2.0 * z / (a2 * alpha), 1.0 / (1.0 - z))});
}

IidConstants iid_constants(GeometryTag geometry, double beta, double rho_min, double noise,
                           Index block_count, std::optional<double> theta) {
  IidConstants c;
  c.geometry = geometry;
  c.block_count = block_count;
  c.pstar_value = pstar(block_count);
  c.n_ratio = n_ratio_of(block_count, c.pstar_value);
  c.beta = beta;
  c.rho_min = rho_min;
  c.noise = noise;
  c.beta_rho = 1.0 - rho_min * (1.0 - beta);
  c.theta = theta ? *theta : select_smoothing(c.beta_rho, block_count);
  c.a1 = (1.0 + c.theta * c.n_ratio) / (1.0 + c.theta);
  c.a2 = smoothed_drift(c.beta_rho, c.theta, c.n_ratio);
  if (c.a2 <= 0.0)
    throw NonpositiveDrift("a2 = " + std::to_string(c.a2) + " with theta = " +
                           std::to_string(c.theta));
  const double common =
      (c.pstar_value - 1.0) * c.n_ratio * (1.0 + c.theta) / c.theta;
  c.a3 = 4.0 * common * (noise + 2.0);
  c.a4 = 2.0 * common * noise;
  c.step_cap = c.a2 / c.a3;
  return c;
}

double ctd_support_radius(const ScalarSupport& support) {
  double radius = 0.0;
  for (Index s = 0; s < support.n_states(); ++s)
    radius = std::max(radius, std::sqrt(support.range(s)));
  return radius;
}

double ctd_noise_constant(const ScalarSupport& support) {
  const double b = ctd_support_radius(support);
  return 4.0 * b * b;
}

MtdNoise mtd_noise_constants(const MmdGeometry& geometry, const FiniteMdp& mdp,
                             const Policy& policy, const WeightField& fixed_point_field,
                             std::optional<double> upsilon) {
  MtdNoise noise;
  noise.beta = std::pow(mdp.discount.value(), geometry.support.kernel.c / 2.0);
  const BlockField star = embed_field_mtd(fixed_point_field, geometry.support);

  double sup_norm = 0.0;
  for (const Vector& block : star) sup_norm = std::max(sup_norm, block.norm());
  noise.ustar_norm = sup_norm;

  // Centered one-sample deviation at the fixed point, maximized over states
  // and the finitely many realized (reward, successor) pairs.
  double b_star = 0.0;
  for (Index s = 0; s < mdp.n_states; ++s) {
    for (Index a = 0; a < mdp.n_actions; ++a) {
      if (policy.probs(s, a) == 0.0) continue;
      const Vector r = mdp.reward_at(s, a).transpose();
      for (Index sn = 0; sn < mdp.n_states; ++sn) {
        if (mdp.transition[a](s, sn) == 0.0) continue;
        const Vector target = sampled_target_mtd(star, s, r, sn, mdp.discount.value(),
                                                 geometry.support);
        b_star = std::max(b_star, (target - star[s]).norm());
      }
    }
  }
  noise.b_star = b_star;
  noise.b_m = 2.0 * noise.beta * sup_norm + b_star;
  noise.c1 = 2.0 * noise.b_m * noise.b_m;
  noise.c2 = 8.0 * noise.beta * noise.beta;

  if (upsilon) {
    noise.upsilon = *upsilon;
    noise.upsilon_provenance = "user supplied";
  } else {
    // Radius of the iterate set reachable from the default start under the
    // pathwise affine recursion bound (convex updates shrink toward the
    // invariant ball of radius b_star / (1 - beta) around U*).
    const WeightField start = first_atom_field(Geometry{MmdGeometry{geometry.support}});
    const BlockField start_blocks = embed_field_mtd(start, geometry.support);
    double d0 = 0.0;
    for (std::size_t s = 0; s < star.size(); ++s)
      d0 = std::max(d0, (start_blocks[s] - star[s]).norm());
    const double radius = sup_norm + std::max(d0, b_star / (1.0 - noise.beta));
    noise.upsilon = radius * radius;
    noise.upsilon_provenance = "reachable-radius default";
  }
  noise.noise = noise.c1 + 2.0 * noise.c2 * (1.0 + noise.upsilon);
  return noise;
}

std::int64_t mixing_time_at(const MixingProfile& mixing, const StepSchedule& schedule,
                            std::int64_t k) {
  return mixing.t_delta(step_size(schedule, k));
}

MarkovConstants markov_constants(GeometryTag geometry, double beta, double A1, double A2,
                                 double B2, Index block_count, double u0_distance,
                                 const MixingProfile& mixing, const StepSchedule& schedule,
                                 std::int64_t k_max, std::optional<double> theta) {
  MarkovConstants c;
  c.geometry = geometry;
  c.block_count = block_count;
  c.pstar_value = pstar(block_count);
  c.n_ratio = n_ratio_of(block_count, c.pstar_value);
  c.beta = beta;
  c.mu_min = mixing.mu_min;
  c.beta_mu = 1.0 - c.mu_min * (1.0 - beta);
  c.theta = theta ? *theta : select_smoothing(c.beta_mu, block_count);
  c.A1 = A1;
  c.A2 = A2;
  c.B2 = B2;
  c.A = A1 + A2 + 1.0;
  c.phi1 = (1.0 + c.theta * c.n_ratio) / (1.0 + c.theta);
  c.phi2 = smoothed_drift(c.beta_mu, c.theta, c.n_ratio);
  if (c.phi2 <= 0.0)
    throw NonpositiveDrift("phi2 = " + std::to_string(c.phi2));
  c.phi3 = 114.0 * (c.pstar_value - 1.0) * (1.0 + c.theta * c.n_ratio) / c.theta;
  c.c1 = std::pow(2.0 * u0_distance + B2 / c.A, 2.0);
  c.c2 = B2 * B2;
  c.window_bound = std::min(c.phi2 / (c.phi3 * c.A * c.A), 1.0 / (4.0 * c.A));

  c.comp_phi1 = 8.0 * c.phi1;
  c.comp_phi3 = c.c2 * c.phi3;
  if (geometry == GeometryTag::ctd) {
    c.comp_phi4 = 0.5 * c.phi1 * c.c2;  // 2 phi1 B_C^2 with B2 = 2 B_C
    c.comp_window_bound = std::min(c.phi2 / (4.0 * c.comp_phi3), 1.0 / 8.0);
  } else {
    c.comp_phi4 = 2.0 * c.phi1 * c.c2 / (c.A * c.A);
    c.comp_window_bound =
        std::min(c.phi2 / (c.comp_phi3 * c.A * c.A), 1.0 / (4.0 * c.A));
  }

  // K = min{k : k >= t_{alpha_k}}; step sizes are nonincreasing so the
  // mixing times are nondecreasing and the scan terminates.
  std::int64_t K = 0;
  while (K < mixing_time_at(mixing, schedule, K)) {
    ++K;
    if (K > (1 << 26))
      throw WindowViolated("no k with k >= t_{alpha_k} below 2^26");
  }
  c.K = K;

  // Trailing-window admissibility on the requested horizon.
  std::vector<double> prefix(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (std::int64_t i = 0; i < k_max; ++i)
    prefix[static_cast<std::size_t>(i) + 1] =
        prefix[static_cast<std::size_t>(i)] + step_size(schedule, i);
  for (std::int64_t k = K; k <= k_max; ++k) {
    const std::int64_t tk = mixing_time_at(mixing, schedule, k);
    const std::int64_t lo = std::max<std::int64_t>(k - tk, 0);
    const double window = prefix[static_cast<std::size_t>(k)] -
                          prefix[static_cast<std::size_t>(lo)];
    if (window > c.window_bound)
      throw WindowViolated("trailing step-size window exceeds " +
                           std::to_string(c.window_bound) + " first at k = " +
                           std::to_string(k));
  }
  return c;
}

double FhConstants::linear_offset(double alpha) const {
  return std::max(1.0, alpha * a3 / a2);
}

double FhConstants::poly_offset(double alpha, double z) const {
  return std::max({1.0, std::pow(alpha * a3 / a2, 1.0 / z),
                   std::pow(2.0 * z / (a2 * alpha), 1.0 / (1.0 - z))});
}

namespace {

FhConstants fh_common(GeometryTag geometry, int horizon, Index n_states, double lambda,
                      double rho_min, std::optional<double> theta) {
  FhConstants c;
  c.geometry = geometry;
  c.horizon = horizon;
  c.block_count = horizon * n_states;
  c.pstar_value = pstar(c.block_count);
  c.n_ratio = n_ratio_of(c.block_count, c.pstar_value);
  c.lambda = lambda;
  c.rho_min = rho_min;
  c.beta_fh = 1.0 - rho_min * (1.0 - lambda);
  c.kappa = rho_min * (1.0 - lambda);
  c.theta = theta ? *theta : select_smoothing(c.beta_fh, c.block_count);
  c.r_fh = (1.0 + c.theta * c.n_ratio) / (1.0 + c.theta);
  c.L_fh = (c.pstar_value - 1.0) / c.theta;
  c.omega_fh = 1.0 - c.beta_fh * std::sqrt(c.r_fh);
  if (c.omega_fh <= 0.0)
    throw NonpositiveDrift("omega_fh = " + std::to_string(c.omega_fh));
  c.d_fh = 8.0 * c.L_fh * c.n_ratio * (1.0 + c.theta);
  return c;
}

}  // namespace

FhConstants fh_constants_ctd(const HorizonGeometry& geometry, double lambda, double rho_min,
                             std::optional<double> theta) {
  FhConstants c = fh_common(GeometryTag::ctd, geometry.horizon(), geometry.n_states(), lambda,
                            rho_min, theta);
  double b = 0.0;
  double weight = 1.0;
  for (int h = 1; h <= geometry.horizon(); ++h) {
    weight *= lambda;
    const auto& support = std::get<CramerGeometry>(geometry.layers[h - 1]).support;
    for (Index s = 0; s < support.n_states(); ++s)
      b = std::max(b, weight * std::sqrt(support.range(s)));
  }
  c.B = b;
  c.alpha_bar = std::min(1.0 / c.horizon, c.omega_fh / c.d_fh);
  c.c1 = c.omega_fh / 4.0;
  c.c2 = c.horizon * c.L_fh * c.n_ratio * c.B * c.B * (128.0 / c.omega_fh + 72.0);
  c.a1 = c.r_fh;
  c.a2 = c.omega_fh / 4.0;
  c.a3 = c.omega_fh / (4.0 * c.alpha_bar);
  c.a4 = 2.0 * (1.0 + c.theta * c.n_ratio) * c.c2;
  return c;
}

FhConstants fh_constants_mtd(const HorizonGeometry& geometry, const FiniteMdp& mdp,
                             const Policy& policy, double lambda, double rho_min,
                             const HorizonField& fixed_point_field,
                             std::optional<double> theta) {
  FhConstants c = fh_common(GeometryTag::mtd, geometry.horizon(), geometry.n_states(), lambda,
                            rho_min, theta);
  const HorizonStack star = embed_stack(geometry, fixed_point_field, lambda);
  c.ustar_norm = weighted_sup_norm(star);

  // Worst weighted one-sample deviation of the stacked target at the fixed
  // point over realized samples. Residual and target deviations coincide at
  // the fixed point because (O_H U*)(s) = U*(s).
  double b_star = 0.0;
  for (Index s = 0; s < mdp.n_states; ++s) {
    for (Index a = 0; a < mdp.n_actions; ++a) {
      if (policy.probs(s, a) == 0.0) continue;
      const Vector r = mdp.reward_at(s, a).transpose();
      for (Index sn = 0; sn < mdp.n_states; ++sn) {
        if (mdp.transition[a](s, sn) == 0.0) continue;
        const std::vector<Vector> targets =
            stacked_sampled_target(geometry, star, s, r, sn);
        double dev = 0.0;
        double weight = 1.0;
        for (int h = 1; h <= geometry.horizon(); ++h) {
          weight *= lambda;
          dev = std::max(dev, weight * (targets[h - 1] - star.blocks[h - 1][s]).norm());
        }
        b_star = std::max(b_star, dev);
      }
    }
  }
  c.b_star_tar = b_star;
  c.b_star_res = b_star;
  c.b_tar = 2.0 * lambda * c.ustar_norm + c.b_star_tar;
  c.b_res = 2.0 * c.ustar_norm + c.b_star_res;

  c.alpha_hat = std::min({1.0 / c.horizon, 1.0 / (2.0 * c.horizon * c.kappa),
                          c.omega_fh / c.d_fh});
  c.C_g = std::exp(1.0 / c.kappa) * std::max(1.0, c.b_res / (2.0 * c.kappa));
  c.C_w = 2.0 * c.C_g + c.b_res;
  c.C_p = c.horizon * c.L_fh * c.n_ratio * c.C_w * c.C_w * (32.0 / c.omega_fh + 36.0);
  c.alpha_bar = std::min(
      c.alpha_hat, c.omega_fh / (64.0 * c.C_p * (1.0 + c.theta * c.n_ratio)));
  c.c1 = c.omega_fh / 4.0;
  c.c2 = 2.0 * c.C_p * (1.0 + 2.0 * c.ustar_norm * c.ustar_norm);
  c.c3 = 8.0 * c.C_p * (1.0 + c.theta * c.n_ratio);
  c.a1 = c.r_fh;
  c.a2 = c.omega_fh / 8.0;
  c.a3 = c.omega_fh / (8.0 * c.alpha_bar);
  c.a4 = 2.0 * (1.0 + c.theta * c.n_ratio) * c.c2;
  return c;
}

std::vector<double> envelope_iid(const IidConstants& c, const StepSchedule& schedule,
                                 std::span<const std::int64_t> ks, double initial_sq_error) {
  std::vector<double> values(ks.size());
  std::visit(
      Overload{
          [&](const ConstantStep& s) {
            if (s.alpha > c.step_cap)
              throw InadmissibleSchedule("alpha exceeds the constant-step cap a2/a3 = " +
                                         std::to_string(c.step_cap));
            for (std::size_t i = 0; i < ks.size(); ++i)
              values[i] = c.a1 * initial_sq_error *
                              std::pow(1.0 - c.a2 * s.alpha, static_cast<double>(ks[i])) +
                          c.a4 * s.alpha / c.a2;
          },
          [&](const LinearStep& s) {
            if (s.alpha * c.a2 <= 1.0)
              throw InadmissibleSchedule("linear schedule needs alpha > 1/a2 = " +
                                         std::to_string(1.0 / c.a2));
            const double h_min = c.linear_offset(s.alpha);
            if (s.offset < h_min)
              throw InadmissibleSchedule("linear offset below threshold h(alpha) = " +
                                         std::to_string(h_min));
            for (std::size_t i = 0; i < ks.size(); ++i) {
              const double kh = static_cast<double>(ks[i]) + s.offset;
              values[i] = c.a1 * initial_sq_error *
                              std::pow(s.offset / kh, c.a2 * s.alpha) +
                          4.0 * kE * s.alpha * s.alpha * c.a4 /
                              ((c.a2 * s.alpha - 1.0) * kh);
            }
          },
          [&](const PolyStep& s) {
            if (s.exponent <= 0.0 || s.exponent >= 1.0)
              throw InadmissibleSchedule("poly exponent must lie in (0,1)");
            const double h_min = c.poly_offset(s.alpha, s.exponent);
            if (s.offset < h_min)
              throw InadmissibleSchedule("poly offset below threshold h(alpha, z) = " +
                                         std::to_string(h_min));
            const double z = s.exponent;
            for (std::size_t i = 0; i < ks.size(); ++i) {
              const double kh = static_cast<double>(ks[i]) + s.offset;
              values[i] =
                  c.a1 * initial_sq_error *
                      std::exp(-c.a2 * s.alpha / (1.0 - z) *
                               (std::pow(kh, 1.0 - z) - std::pow(s.offset, 1.0 - z))) +
                  2.0 * s.alpha * c.a4 / (c.a2 * std::pow(kh, z));
            }
          }},
      schedule);
  return values;
}

std::vector<double> envelope_markov(const MarkovConstants& c, const StepSchedule& schedule,
                                    const MixingProfile& mixing,
                                    std::span<const std::int64_t> ks) {
  std::vector<double> values(ks.size(), std::numeric_limits<double>::quiet_NaN());
  std::visit(
      Overload{
          [&](const ConstantStep& s) {
            const std::int64_t t_alpha = mixing.t_delta(s.alpha);
            for (std::size_t i = 0; i < ks.size(); ++i) {
              if (ks[i] < t_alpha) continue;
              values[i] = c.phi1 * c.c1 *
                              std::pow(1.0 - c.phi2 * s.alpha,
                                       static_cast<double>(ks[i] - t_alpha)) +
                          (c.phi3 / c.phi2) * c.c2 * s.alpha *
                              static_cast<double>(t_alpha);
            }
          },
          [&](const LinearStep& s) {
            if (s.alpha * c.phi2 <= 1.0)
              throw InadmissibleSchedule("linear schedule needs alpha > 1/phi2 = " +
                                         std::to_string(1.0 / c.phi2));
            if (s.offset < 1.0)
              throw InadmissibleSchedule("linear offset must be at least 1");
            for (std::size_t i = 0; i < ks.size(); ++i) {
              if (ks[i] < c.K) continue;
              const double kh = static_cast<double>(ks[i]) + s.offset;
              const auto tk = static_cast<double>(mixing_time_at(mixing, schedule, ks[i]));
              values[i] = c.phi1 * c.c1 *
                              std::pow((static_cast<double>(c.K) + s.offset) / kh,
                                       c.phi2 * s.alpha) +
                          8.0 * kE * s.alpha * s.alpha * c.phi3 * c.c2 /
                              (c.phi2 * s.alpha - 1.0) * tk / kh;
            }
          },
          [&](const PolyStep& s) {
            if (s.exponent <= 0.0 || s.exponent >= 1.0)
              throw InadmissibleSchedule("poly exponent must lie in (0,1)");
            const double z = s.exponent;
            for (std::size_t i = 0; i < ks.size(); ++i) {
              if (ks[i] < c.K) continue;
              const double kh = static_cast<double>(ks[i]) + s.offset;
              const double Kh = static_cast<double>(c.K) + s.offset;
              const auto tk = static_cast<double>(mixing_time_at(mixing, schedule, ks[i]));
              values[i] = c.phi1 * c.c1 *
                              std::exp(-c.phi2 * s.alpha / (1.0 - z) *
                                       (std::pow(kh, 1.0 - z) - std::pow(Kh, 1.0 - z))) +
                          4.0 * c.phi3 * c.c2 * s.alpha / c.phi2 * tk / std::pow(kh, z);
            }
          }},
      schedule);
  return values;
}

std::vector<double> envelope_fh(const FhConstants& c, const StepSchedule& schedule,
                                std::span<const std::int64_t> ms, double initial_sq_error) {
  std::vector<double> values(ms.size());
  const double H = c.horizon;
  std::visit(
      Overload{
          [&](const ConstantStep& s) {
            if (s.alpha > c.a2 / c.a3)
              throw InadmissibleSchedule("alpha exceeds the boundary cap a2/a3 = " +
                                         std::to_string(c.a2 / c.a3));
            for (std::size_t i = 0; i < ms.size(); ++i)
              values[i] = c.a1 * initial_sq_error *
                              std::pow(1.0 - c.a2 * H * s.alpha,
                                       static_cast<double>(ms[i])) +
                          c.a4 * s.alpha / c.a2;
          },
          [&](const LinearStep& s) {
            if (s.alpha * c.a2 <= 1.0)
              throw InadmissibleSchedule("linear schedule needs alpha > 1/a2 = " +
                                         std::to_string(1.0 / c.a2));
            const double g_min = c.linear_offset(s.alpha);
            if (s.offset < g_min)
              throw InadmissibleSchedule("linear offset below threshold g(alpha) = " +
                                         std::to_string(g_min));
            const double tau0 = s.offset + H - 1.0;
            for (std::size_t i = 0; i < ms.size(); ++i) {
              const double tau = static_cast<double>(ms[i]) * H + s.offset + H - 1.0;
              values[i] = c.a1 * initial_sq_error * std::pow(tau0 / tau, c.a2 * s.alpha) +
                          c.a4 * H * H * s.alpha * s.alpha /
                              ((c.a2 * s.alpha - 1.0) * tau);
            }
          },
          [&](const PolyStep& s) {
            if (s.exponent <= 0.0 || s.exponent >= 1.0)
              throw InadmissibleSchedule("poly exponent must lie in (0,1)");
            const double g_min = c.poly_offset(s.alpha, s.exponent);
            if (s.offset < g_min)
              throw InadmissibleSchedule("poly offset below threshold g(alpha, z) = " +
                                         std::to_string(g_min));
            const double z = s.exponent;
            const double tau0 = s.offset + H - 1.0;
            for (std::size_t i = 0; i < ms.size(); ++i) {
              const double tau = static_cast<double>(ms[i]) * H + s.offset + H - 1.0;
              values[i] =
                  c.a1 * initial_sq_error *
                      std::exp(-c.a2 * s.alpha / (1.0 - z) *
                               (std::pow(tau, 1.0 - z) - std::pow(tau0, 1.0 - z))) +
                  2.0 * c.a4 * H * H * s.alpha / (c.a2 * std::pow(tau, z));
            }
          }},
      schedule);
  return values;
}

MoreauResult moreau_envelope_eval(const BlockField& iterate, const BlockField& center,
                                  double theta, double p) {
  if (iterate.size() != center.size())
    throw DimensionMismatch("moreau_envelope_eval block counts differ");
  std::vector<double> radii(iterate.size());
  double r_max = 0.0;
  for (std::size_t s = 0; s < iterate.size(); ++s) {
    radii[s] = (iterate[s] - center[s]).norm();
    r_max = std::max(r_max, radii[s]);
  }
  MoreauResult result;
  if (r_max == 0.0) return result;

  // The optimal W places each block on the segment [center(s), iterate(s)],
  // at distance min(t, r_s) from the center for one shared level t. The
  // envelope is therefore the minimum over t of
  //   g(t) = t^2 / 2 + (sum_s max(r_s - t, 0)^p)^(2/p) / (2 theta),
  // a scalar convex function on [0, r_max].
  const auto g = [&](double t) {
    double acc = 0.0;
    for (double r : radii) {
      const double excess = r - t;
      if (excess > 0.0) acc += std::pow(excess, p);
    }
    return 0.5 * t * t + std::pow(acc, 2.0 / p) / (2.0 * theta);
  };

  double lo = 0.0, hi = r_max;
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * r_max; ++iter) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = g(x2);
    }
  }
  result.clip_level = 0.5 * (lo + hi);
  result.value = g(result.clip_level);
  const double step = std::max(1e-9 * r_max, 1e-12);
  const double inner = std::clamp(result.clip_level, step, r_max - step);
  result.stationarity_gap = std::abs(g(inner + step) - g(inner - step)) / (2.0 * step);
  if (!(result.value >= 0.0) || !std::isfinite(result.value))
    throw OptimizerStalled("non-finite envelope value");
  return result;
}

}  // namespace bounds
}  // namespace distlab
