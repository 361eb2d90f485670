#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "crcdl/design.hpp"
#include "crcdl/grid.hpp"

namespace crcdl {

/** Open or closed observation interval for a latent mass, in grams. */
struct CensorInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/**
 * Interval known to contain the latent true mass given what was recorded.
 * Masses are read to the nearest gram, so a recorded value of z puts the
 * truth in (z - 0.5, z + 0.5), floored at 0. A reading at the scale maximum
 * means the scale pegged: (max - 0.5, inf). No capture, or a capture with
 * no reading, gives the uninformative (0, inf).
 */
CensorInterval censoring_interval(bool captured, std::optional<double> z_obs, double scale_max = 60.0);

/**
 * @brief Mean-mass process parameters and latent arrays.
 *
 * Each individual's expected mass starts at its entry period,
 * lambda_{i,b} ~ Normal(mu_lambda, sigma_lambda1), and then follows a random
 * walk with per-interval drift, lambda_{i,j} ~ Normal(lambda_{i,j-1} +
 * Delta[j-1], sigma_lambda2). Occasion-level true masses scatter around the
 * period mean with sd sigma_z. The latent arrays (lambda per individual and
 * period, z_latent per recorded mass) ride along with the parameters so a
 * chain can carry the whole mass model in one place.
 */
struct MassProcessParams {
  double mu_lambda = 0.0;
  double sigma_lambda1 = 1.0;
  std::vector<double> Delta;  // length k1-1
  double sigma_lambda2 = 1.0;
  double sigma_z = 1.0;
  Grid2<double> lambda;          // M x k1
  std::vector<double> z_latent;  // aligned with the ingested mass records
};

/** Two-state categorical covariate (1 = healthy, 2 = diseased in the
 *  motivating use). nu is the state distribution at entry, omega the row
 *  transition matrix between consecutive periods; both time-constant. The
 *  latent state grid rides along as with the mass model. */
struct DiseaseProcessParams {
  std::array<double, 2> nu{0.5, 0.5};
  std::array<std::array<double, 2>, 2> omega{{{0.5, 0.5}, {0.5, 0.5}}};
  Grid2<int> z;  // M x k1, values 1 or 2
};

/**
 * Sum of truncated-Normal log densities of latent masses: entry r is the
 * Normal(lambda_at[r], sigma_z) log pdf of z_latent[r] minus the log Normal
 * mass on (intervals[r].lo, intervals[r].hi). Returns -inf if any latent
 * value falls outside its interval.
 */
double log_mass_obs(std::span<const double> z_latent, std::span<const double> lambda_at, double sigma_z,
                    std::span<const CensorInterval> intervals);

/**
 * Random-walk log density of the mean-mass rows: for each individual i with
 * first_alive[i] < k1, the entry-period factor Normal(mu_lambda,
 * sigma_lambda1) plus drifted innovations through period k1-1. Rows with
 * first_alive[i] >= k1 contribute nothing.
 */
double log_mass_walk(const Grid2<double>& lambda, const MassProcessParams& params,
                     std::span<const int> first_alive);

/** Centre and scale one mass value: (z - loc) / scale. */
double standardize_mass(double z, double loc, double scale);

/**
 * Categorical-chain log density over included individuals: log nu at the
 * entry period plus log omega factors for each later transition through
 * period k1-1. Returns -inf on a zero-probability state or transition.
 */
double log_disease_process(const Grid2<int>& z, const std::array<double, 2>& nu,
                           const std::array<std::array<double, 2>, 2>& omega, std::span<const int> first_alive,
                           std::span<const std::uint8_t> included);

/** Standardised mass effect matrix: (lambda - loc) / scale elementwise. */
Grid2<double> covariate_effect(const MassProcessParams& params, double loc, double scale);

/** Disease effect matrix: indicator of state 2. */
Grid2<double> covariate_effect(const DiseaseProcessParams& params);

}  // namespace crcdl
