#pragma once

#include <span>
#include <vector>

#include "crcdl/design.hpp"
#include "crcdl/grid.hpp"

namespace crcdl {

/**
 * @brief Augmented population state for M pseudo-individuals over k1 periods.
 *
 * born(i,j) = 1 once individual i has entered the population by period j
 * (monotone non-decreasing in j). not_dead(i,j) = 1 while it has not yet
 * died (monotone non-increasing, always 1 in period 0; death before entry
 * cannot occur). included[i] is the data-augmentation membership flag; rows
 * with included[i] = 0 carry a trajectory but contribute no density.
 * Individual i is alive in period j iff born(i,j) && not_dead(i,j).
 */
struct AugmentedState {
  Grid2<std::uint8_t> born;
  Grid2<std::uint8_t> not_dead;
  std::vector<std::uint8_t> included;

  AugmentedState() = default;
  AugmentedState(int M, int k1) : born(M, k1, 0), not_dead(M, k1, 1), included(M, 1) {}

  int M() const { return born.rows(); }
  int k1() const { return born.cols(); }

  bool alive(int i, int j) const { return born(i, j) && not_dead(i, j); }

  /** First period alive, or k1 if never born. */
  int first_alive(int i) const {
    for (int j = 0; j < k1(); ++j)
      if (born(i, j)) return j;
    return k1();
  }

  /** Last period alive, or -1 if never born. */
  int last_alive(int i) const {
    int last = -1;
    for (int j = 0; j < k1(); ++j)
      if (alive(i, j)) last = j;
    return last;
  }

  /** Rewrite row i as: enters at b, last alive at d (0-based, b <= d < k1). */
  void set_trajectory(int i, int b, int d) {
    for (int j = 0; j < k1(); ++j) {
      born(i, j) = (j >= b) ? 1 : 0;
      not_dead(i, j) = (j <= d) ? 1 : 0;
    }
  }

  /** Throws ValidationError on any violated structural invariant. */
  void validate() const;
};

/** Entry-process parameters: conditional entry probabilities and the
 *  augmentation inclusion probability. zeta has length k1 with zeta[k1-1]
 *  pinned to 1 so that every included individual enters by the last period. */
struct BirthParams {
  std::vector<double> zeta;
  double psi = 0.5;
};

/** Per-draw demographic summaries derived from a population state. */
struct DemographicSummary {
  int n_total = 0;                  // number of included individuals
  std::vector<int> n_per_period;    // alive counts N_j
  std::vector<int> lifetime;        // periods alive per individual, 0 if never born
  std::vector<double> beta;         // entry fractions, beta[0] = pre-study mass
  std::vector<double> eta;          // per-capita entry rates, NaN where N_j = 0
};

/** Alive counts per period over included individuals. */
std::vector<int> derive_abundance(const AugmentedState& state);

/** Periods-alive count per individual (included or not). */
std::vector<int> derive_lifetime(const AugmentedState& state);

/**
 * Map conditional entry probabilities to unconditional entry fractions:
 * beta[0] = zeta[0], beta[j] = zeta[j] * (1 - sum of earlier betas).
 * Requires zeta.back() == 1; the result sums to 1.
 */
std::vector<double> zeta_to_beta(std::span<const double> zeta);

/**
 * Per-capita entry rates, one per between-period interval. The result has
 * length k1-1; entry r scales the births in interval r by the alive count at
 * the interval's start: eta[r] = beta[r+1] * n_total / n_per_period[r], NaN
 * where that alive count is zero. Derived reporting quantity only, never a
 * sampling parameterisation.
 */
std::vector<double> beta_to_eta(std::span<const double> beta, int n_total, std::span<const int> n_per_period);

/** Bundle the per-draw derived quantities for recording. */
DemographicSummary make_demographic_summary(const AugmentedState& state, std::span<const double> zeta);

}  // namespace crcdl
