#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "crcdl/covariates.hpp"
#include "crcdl/data.hpp"
#include "crcdl/diagnostics.hpp"
#include "crcdl/likelihood.hpp"
#include "crcdl/popstate.hpp"
#include "crcdl/rng.hpp"

namespace crcdl {

/** Thrown when a chain cannot proceed (non-finite starting density,
 *  degenerate configuration). Distinct from input validation failures. */
class SamplerError : public std::runtime_error {
 public:
  explicit SamplerError(const std::string& what) : std::runtime_error(what) {}
};

struct Priors {
  double coef_sd = 10.0;   // Normal(0, coef_sd) on logit coefficients, mu_lambda and drift terms
  double sd_upper = 10.0;  // Uniform(0, sd_upper) on every sd parameter
  double zeta_a = 1.0, zeta_b = 1.0;
  double dirichlet = 1.0;
  // psi is always Uniform(0, 1)
};

struct SamplerConfig {
  int n_chains = 3;
  long n_adapt = 5000;
  long n_iter = 20000;
  int thin = 1;
  std::uint64_t seed = 1;
  double target_accept = 0.44;
  std::map<std::string, double> proposal_scales;  // initial scales by block name
  Priors priors;
  bool censoring = true;  // treat mass readings as interval observations
  bool fixed_standardization = false;
  double loc = 0.0, scale = 1.0;  // used when fixed_standardization
  int M = 0;                      // augmented list size; 0 means 2 * n_observed
  int progress_every = 0;         // stderr progress cadence, 0 silent
  bool check_identities = false;  // verify derived-quantity identities per kept draw
  long validate_every = 0;        // structural state validation cadence, 0 off
};

/** Live state of one chain. Latent matrices for the mass and categorical
 *  covariates live inside their parameter structs. */
struct ChainState {
  AugmentedState state;
  BirthParams birth;
  LinkParams link;
  MassProcessParams mass;
  DiseaseProcessParams disease;
  std::vector<int> first_alive, last_alive;
  long iteration = 0;
};

struct FitResult {
  PosteriorDraws draws;
  double loc = 0.0, scale = 1.0;
  int M = 0;
  std::map<std::string, double> acceptance;  // pooled per proposal block
  std::vector<std::string> warnings;
  long identity_violations = 0;
  double frac_n_at_m = 0.0;  // kept draws with N_total == M
};

/**
 * @brief Metropolis-within-Gibbs chain over the augmented complete-data
 * posterior.
 *
 * One sweep runs, in order: conjugate and random-walk parameter updates,
 * regeneration of prior-only structure (excluded individuals' trajectories
 * and every individual's pre-entry covariate cells, which carry the process
 * density but no observation terms), exact enumerated Gibbs updates of each
 * included individual's entry and death periods, covariate cell updates
 * (random-walk for mean masses, two-point enumeration for disease states,
 * truncated-Normal draws for latent masses), and finally the inclusion
 * flags with their Beta-conjugate probability.
 *
 * Parameter updates condition only on included individuals' model factors;
 * the prior-only structure is redrawn from the updated parameters
 * immediately afterwards, which keeps the composed kernel exact.
 *
 * Random-walk proposals adapt during the adaptation phase only, scaling by
 * exp((accept - target) / t^0.6) per update, then stay frozen.
 */
class GibbsSampler {
 public:
  GibbsSampler(const CaptureData& data, ModelKind model, const SamplerConfig& cfg, int chain_index,
               double loc, double scale);

  void init();

  void update_parameters();
  void update_birth_death();
  void update_covariates();
  void update_inclusion();

  /** One full sweep; t is the 1-based adaptation index while adapting. */
  void sweep(bool adapting, long t);

  DemographicSummary derived() const;
  std::vector<std::string> column_names() const;
  std::vector<double> record_row(long iter) const;

  /** Complete-data log joint density assembled from the pure evaluators,
   *  used for start-up checks and debugging. */
  double log_joint() const;

  /** Posterior log odds of inclusion for a never-captured individual. */
  double inclusion_log_odds(int i) const;

  /** Log full-conditional density of mean-mass cell (i, j) at a value,
   *  up to an additive constant. */
  double mass_cell_logdens(int i, int j, double value) const;

  ChainState& chain() { return ch_; }
  const StudyDesign& design() const { return des_; }
  const std::map<std::string, std::array<long, 2>>& acceptance_counts() const { return accepts_; }

  /** Structural and identity checks; returns the number of violations. */
  long check_draw_identities() const;
  void validate_state() const;

 private:
  double effect(int i, int j) const;
  double logit_surv(int i, int j) const;
  double logit_capt(int i, int j, int l) const;
  double log_surv_term(int i, int j) const;   // survive interval j
  double log_death_term(int i, int j) const;  // die in interval j
  double log_capture_cell(int i, int j) const;
  double log_nocapture_cell(int i, int j) const;
  std::uint8_t captured(int i, int j, int l) const;

  double mortality_loglik() const;
  double capture_loglik() const;

  void update_entry_probs();
  void update_disease_probs();
  void update_coefficients();
  void update_random_effects();
  void update_sds();
  void update_mass_params();
  void refresh_prior_only_structure();
  void update_entry_period(int i);
  void update_death_period(int i);
  void update_mass_cells();
  void update_mass_latents();
  void update_disease_cells();

  void draw_prior_trajectory(int i);
  void draw_prebirth_covariates(int i);
  void draw_covariate_row(int i, int b);

  // random walk on a parameter with a Normal(0, prior_sd) prior; loglik reads
  // the parameter through the chain state, so `par` must alias that state
  void rwm_update(const std::string& block, int index, double& par, double prior_sd,
                  const std::function<double()>& loglik);
  // random walk on log sd against a Uniform(0, sd_upper) prior on the sd scale
  void rwm_logsd(int index, double& sd, const std::function<double(double)>& loglik);

  // acceptance bookkeeping plus, while adapting, the stochastic-approximation
  // scale update toward target_accept
  void tally(const std::string& block, int index, int accepted);

  // immutable problem description
  StudyDesign des_;
  bool robust_ = false;
  CovariateKind cov_ = CovariateKind::none;
  int n_obs_ = 0;
  Grid3<std::uint8_t> X_;
  std::vector<int> first_cap_, last_cap_;
  std::vector<MassRecord> mass_recs_;
  std::vector<CensorInterval> mass_ivs_;
  Grid2<std::vector<int>> mass_by_cell_;  // record indices per (i, j), observed rows only
  Grid2<int> state_known_;
  SamplerConfig cfg_;
  double loc_ = 0.0, scale_ = 1.0;
  int chain_index_ = 0;
  bool adapting_ = false;
  long adapt_t_ = 1;

  ChainState ch_;
  Rng rng_;
  std::map<std::string, std::vector<double>> scales_;
  std::map<std::string, std::array<long, 2>> accepts_;
  std::vector<double> logw_;  // enumeration buffer
};

/** Fit with n_chains independent chains (run concurrently); returns kept
 *  draws per chain plus bookkeeping. Chain c uses derive_seed(seed, c). */
FitResult run(const CaptureData& data, ModelKind model, const SamplerConfig& cfg);

/** Column layout of the draw matrix for a given problem shape. */
std::vector<std::string> draw_column_names(const StudyDesign& design, ModelKind model, CovariateKind cov);

}  // namespace crcdl
