#pragma once

#include <span>
#include <vector>

#include "crcdl/design.hpp"
#include "crcdl/grid.hpp"
#include "crcdl/popstate.hpp"

namespace crcdl {

/**
 * @brief Logit-scale survival and capture parameters.
 *
 * Survival over interval j (period j to j+1):
 *   logit S_ij = alpha0 + alpha1 * effect(i,j) + eta_S[j]
 * Capture at period j, secondary l:
 *   logit p_ijl = gamma0 + gamma1 * effect(i,j) + eta_p[j] + eps_p(j,l)
 * eps_p only applies to robust designs; effect(i,j) is the standardised
 * covariate value (zero when no covariate is modelled). Survival reads the
 * covariate at the interval's start.
 */
struct LinkParams {
  double alpha0 = 0.0, alpha1 = 0.0;
  double gamma0 = 0.0, gamma1 = 0.0;
  std::vector<double> eta_S;   // length k1-1
  std::vector<double> eta_p;   // length k1
  Grid2<double> eps_p;         // k1 x max_k2, robust designs only
  double sigma_S = 1.0, sigma_p1 = 1.0, sigma_p2 = 1.0;
};

/** Evaluated link probabilities. surv is M x (k1-1); exactly one of p
 *  (standard, M x k1) and p_robust (M x k1 x max_k2) is populated. */
struct LinkProbs {
  Grid2<double> surv;
  Grid2<double> p;
  Grid3<double> p_robust;
};

LinkProbs link_probabilities(const LinkParams& params, const Grid2<double>& effect, const StudyDesign& design,
                             bool robust);

/**
 * Entry-process log density over included individuals. Sequential Bernoulli
 * entries: an individual not yet entered faces probability zeta[j] of
 * entering at period j; zeta[k1-1] = 1. Returns -inf for a non-monotone
 * born row or a row that never enters.
 */
double log_birth(const Grid2<std::uint8_t>& born, std::span<const std::uint8_t> included,
                 std::span<const double> zeta);

/**
 * Mortality log density over included individuals. Transition factors for
 * j >= 1: an individual alive in period j-1 survives with probability
 * surv(i, j-1); one not yet entered persists with probability 1. Returns
 * -inf for resurrection, death before the first period, or death of an
 * unborn individual.
 */
double log_mortality(const Grid2<std::uint8_t>& not_dead, const Grid2<std::uint8_t>& born,
                     std::span<const std::uint8_t> included, const Grid2<double>& surv);

/**
 * Capture log density for a standard design: Bernoulli factors with
 * probability p(i,j) on periods where the individual is alive and included,
 * -inf if any capture falls outside those periods.
 */
double log_capture(const Grid2<std::uint8_t>& captures, const Grid2<std::uint8_t>& born,
                   const Grid2<std::uint8_t>& not_dead, std::span<const std::uint8_t> included,
                   const Grid2<double>& p);

/** Robust-design capture log density; alive status is constant within a
 *  primary period and secondaries l = 0..k2[j]-1 contribute independent
 *  Bernoulli factors. */
double log_capture_robust(const Grid3<std::uint8_t>& captures, const Grid2<std::uint8_t>& born,
                          const Grid2<std::uint8_t>& not_dead, std::span<const std::uint8_t> included,
                          const Grid3<double>& p, std::span<const int> k2);

}  // namespace crcdl
