#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "crcdl/covariates.hpp"
#include "crcdl/data.hpp"
#include "crcdl/likelihood.hpp"
#include "crcdl/popstate.hpp"
#include "crcdl/rng.hpp"

namespace crcdl {

/** Generating parameter set for the forward simulator. Fields not relevant
 *  to the chosen model and covariate kinds are ignored. */
struct SimParams {
  ModelKind model = ModelKind::standard;
  CovariateKind covariate = CovariateKind::none;
  StudyDesign design;  // M = pseudo-individual pool size

  double psi = 0.5;
  std::vector<double> zeta;  // length k1, last entry 1

  double alpha0 = 0.0, alpha1 = 0.0;
  double gamma0 = 0.0, gamma1 = 0.0;
  double sigma_S = 0.3, sigma_p1 = 0.3, sigma_p2 = 0.2;

  // mass covariate
  double mu_lambda = 35.0, sigma_lambda1 = 8.0, sigma_lambda2 = 2.0, sigma_z = 1.5;
  std::vector<double> Delta;  // length k1-1
  double mass_loc = 40.0, mass_scale = 8.0, mass_max = 60.0;

  // categorical covariate
  std::array<double, 2> nu{0.85, 0.15};
  std::array<std::array<double, 2>, 2> omega{{{0.96, 0.04}, {0.25, 0.75}}};
  double miss_rate = 0.0;
};

/** Everything the simulator drew, for comparison against a fit. */
struct TruthRecord {
  SimParams params;
  std::uint64_t seed = 0;
  std::vector<double> eta_S, eta_p;
  Grid2<double> eps_p;
  AugmentedState state;
  Grid2<double> lambda;
  Grid2<int> zstate;
  int n_total = 0;
  std::vector<int> n_per_period;
  Grid2<int> n_per_state;  // 2 x k1
  int n_observed = 0;
};

/**
 * Draw a complete population history and its observed capture records.
 * Period random effects are drawn from their sds; each pseudo-individual
 * gets an inclusion flag, an entry period, a covariate trajectory and a
 * death period; captures are Bernoulli at the linked probabilities. Mass
 * readings are the latent occasion mass rounded to the nearest gram and
 * pegged at the scale maximum. Only individuals with at least one capture
 * appear in the returned data.
 */
std::pair<CaptureData, TruthRecord> generate(const SimParams& params, std::uint64_t seed);

/** Independently replace each recorded categorical state with the unknown
 *  marker with the given probability. */
void mask_disease(CaptureData& data, double miss_rate, std::uint64_t seed);

/** Robust-design mass study shaped like a six-period vole trapping grid. */
SimParams vole_preset();

/** Standard-design disease study shaped like a sixteen-period finch survey. */
SimParams finch_preset();

}  // namespace crcdl
