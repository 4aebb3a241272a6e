#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distlab/chain.hpp"
#include "distlab/fixed_horizon.hpp"
#include "distlab/sa.hpp"

namespace distlab {
namespace bounds {

enum class GeometryTag { ctd, mtd };

/// Smoothing exponent max{2, ceil(ln N)} for N asynchronous blocks; makes
/// N^(2/p*) <= e^2.
int pstar(Index block_count);

/// Largest theta on the grid {2^-j : j = 0..60} whose smoothed drift
/// 1 - beta_bar * sqrt((1 + theta N^(2/p*)) / (1 + theta)) retains at least
/// half the unsmoothed limit (1 - beta_bar) / 2.
double select_smoothing(double beta_bar, Index block_count);

struct IidConstants {
  GeometryTag geometry;
  Index block_count = 0;
  int pstar_value = 2;
  double n_ratio = 0.0;  // N^(2/p*)
  double theta = 0.0;
  double beta = 0.0;
  double rho_min = 0.0;
  double noise = 0.0;  // conditional second-moment constant A^iid
  double beta_rho = 0.0;
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
  double step_cap = 0.0;  // a2 / a3

  double linear_offset(double alpha) const;          // admissible h for alpha/(k+h)
  double poly_offset(double alpha, double z) const;  // admissible h for alpha/(k+h)^z
};

IidConstants iid_constants(GeometryTag geometry, double beta, double rho_min, double noise,
                           Index block_count, std::optional<double> theta = std::nullopt);

/// Noise constant of the scalar categorical geometry: 4 B_C^2 with
/// B_C = max_s sqrt(theta_d(s) - theta_1(s)).
double ctd_noise_constant(const ScalarSupport& support);
double ctd_support_radius(const ScalarSupport& support);  // B_C

/// Affine-noise data of the signed categorical geometry at the fixed point.
struct MtdNoise {
  double beta = 0.0;        // gamma^(c/2)
  double b_star = 0.0;      // worst centered one-sample deviation at U*
  double b_m = 0.0;         // 2 beta |U*| + b_star
  double c1 = 0.0;          // 2 b_m^2
  double c2 = 0.0;          // 8 beta^2
  double ustar_norm = 0.0;  // |U*|_{2,inf}
  double upsilon = 0.0;     // second-moment absorption input
  std::string upsilon_provenance;
  double noise = 0.0;  // c1 + 2 c2 (1 + upsilon)
};

/// Computes the MTD noise constants by maximizing over states and the
/// finitely many realized rewards. `upsilon` defaults to the squared
/// sup-norm radius of the iterate set reachable under the pathwise affine
/// recursion bound from the default start.
MtdNoise mtd_noise_constants(const MmdGeometry& geometry, const FiniteMdp& mdp,
                             const Policy& policy, const WeightField& fixed_point_field,
                             std::optional<double> upsilon = std::nullopt);

struct MarkovConstants {
  GeometryTag geometry;
  Index block_count = 0;
  int pstar_value = 2;
  double n_ratio = 0.0;
  double theta = 0.0;
  double beta = 0.0;
  double mu_min = 0.0;
  double beta_mu = 0.0;
  double A1 = 0.0, A2 = 0.0, B2 = 0.0, A = 0.0;
  double phi1 = 0.0, phi2 = 0.0, phi3 = 0.0;  // phi3 carries no noise scaling
  double c1 = 0.0, c2 = 0.0;
  double window_bound = 0.0;  // min{phi2 / (phi3 A^2), 1 / (4A)}
  // Composite per-geometry constants, reported verbatim from their displays.
  double comp_phi1 = 0.0, comp_phi3 = 0.0, comp_phi4 = 0.0;
  double comp_window_bound = 0.0;
  std::int64_t K = 0;  // first k with k >= t_{alpha_k}
};

/// Computes the Markovian constants and the step-size window check; throws
/// WindowViolated naming the first k >= K whose trailing step-size window
/// exceeds the bound (checked up to k_max).
MarkovConstants markov_constants(GeometryTag geometry, double beta, double A1, double A2,
                                 double B2, Index block_count, double u0_distance,
                                 const MixingProfile& mixing, const StepSchedule& schedule,
                                 std::int64_t k_max,
                                 std::optional<double> theta = std::nullopt);

std::int64_t mixing_time_at(const MixingProfile& mixing, const StepSchedule& schedule,
                            std::int64_t k);

struct FhConstants {
  GeometryTag geometry;
  int horizon = 1;
  Index block_count = 0;  // H |S|
  int pstar_value = 2;
  double n_ratio = 0.0;
  double theta = 0.0;
  double lambda = 0.0;
  double rho_min = 0.0;
  double beta_fh = 0.0;   // 1 - rho_min (1 - lambda)
  double kappa = 0.0;     // rho_min (1 - lambda)
  double r_fh = 0.0, L_fh = 0.0, omega_fh = 0.0, d_fh = 0.0;
  double alpha_bar = 0.0;  // admissible cap on alpha_0
  double c1 = 0.0, c2 = 0.0;
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
  // Scalar-geometry constant.
  double B = 0.0;  // max_{h,s} lambda^h sqrt(range of layer support)
  // Signed-geometry constants.
  double alpha_hat = 0.0;
  double b_star_tar = 0.0, b_tar = 0.0;
  double b_star_res = 0.0, b_res = 0.0;
  double C_g = 0.0, C_w = 0.0, C_p = 0.0, c3 = 0.0;
  double ustar_norm = 0.0;

  double linear_offset(double alpha) const;
  double poly_offset(double alpha, double z) const;
};

FhConstants fh_constants_ctd(const HorizonGeometry& geometry, double lambda, double rho_min,
                             std::optional<double> theta = std::nullopt);

FhConstants fh_constants_mtd(const HorizonGeometry& geometry, const FiniteMdp& mdp,
                             const Policy& policy, double lambda, double rho_min,
                             const HorizonField& fixed_point_field,
                             std::optional<double> theta = std::nullopt);

/// Exact right-hand sides of the finite-iteration displays, evaluated at the
/// given indices. Each overload throws InadmissibleSchedule naming the
/// violated threshold.
std::vector<double> envelope_iid(const IidConstants& c, const StepSchedule& schedule,
                                 std::span<const std::int64_t> ks, double initial_sq_error);

/// Markovian envelope; entries below the burn-in index (t_alpha or K) are NaN
/// since the bound is not asserted there.
std::vector<double> envelope_markov(const MarkovConstants& c, const StepSchedule& schedule,
                                    const MixingProfile& mixing,
                                    std::span<const std::int64_t> ks);

/// Fixed-horizon episode-boundary envelope over boundary indices m.
std::vector<double> envelope_fh(const FhConstants& c, const StepSchedule& schedule,
                                std::span<const std::int64_t> ms, double initial_sq_error);

/// Generalized Moreau envelope of the squared block-supremum distance:
///   M(U) = inf_W { |W - U*|_{2,inf}^2 / 2 + |U - W|_{2,p}^2 / (2 theta) }.
/// The minimizer lies blockwise on the segments [U*(s), U(s)], which reduces
/// the infimum to a one-dimensional convex problem in the common clip level;
/// that problem is solved to near machine precision.
struct MoreauResult {
  double value = 0.0;
  double clip_level = 0.0;
  double stationarity_gap = 0.0;  // derivative residual at the minimizer
};
MoreauResult moreau_envelope_eval(const BlockField& iterate, const BlockField& center,
                                  double theta, double p);

}  // namespace bounds
}  // namespace distlab
