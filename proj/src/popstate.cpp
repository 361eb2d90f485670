#include "crcdl/popstate.hpp"

#include <cmath>
#include <string>

#include "crcdl/mathutil.hpp"

namespace crcdl {

void AugmentedState::validate() const {
  const int m = M();
  const int k = k1();
  if (not_dead.rows() != m || not_dead.cols() != k || static_cast<int>(included.size()) != m)
    throw ValidationError("state: born, not_dead and included must agree in size");
  for (int i = 0; i < m; ++i) {
    if (!not_dead(i, 0))
      throw ValidationError("state: individual " + std::to_string(i) + " marked dead in the first period");
    for (int j = 0; j < k; ++j) {
      if (born(i, j) > 1 || not_dead(i, j) > 1)
        throw ValidationError("state: indicator entries must be 0 or 1");
      if (j > 0 && born(i, j) < born(i, j - 1))
        throw ValidationError("state: born row " + std::to_string(i) + " is not monotone non-decreasing");
      if (j > 0 && not_dead(i, j) > not_dead(i, j - 1))
        throw ValidationError("state: not_dead row " + std::to_string(i) + " is not monotone non-increasing");
      // death cannot precede entry
      if (!not_dead(i, j) && !born(i, j))
        throw ValidationError("state: individual " + std::to_string(i) + " dies before entering");
    }
    if (included[i] > 1) throw ValidationError("state: included flags must be 0 or 1");
  }
}

std::vector<int> derive_abundance(const AugmentedState& state) {
  std::vector<int> n(state.k1(), 0);
  for (int i = 0; i < state.M(); ++i) {
    if (!state.included[i]) continue;
    for (int j = 0; j < state.k1(); ++j)
      if (state.alive(i, j)) ++n[j];
  }
  return n;
}

std::vector<int> derive_lifetime(const AugmentedState& state) {
  std::vector<int> life(state.M(), 0);
  for (int i = 0; i < state.M(); ++i)
    for (int j = 0; j < state.k1(); ++j)
      if (state.alive(i, j)) ++life[i];
  return life;
}

std::vector<double> zeta_to_beta(std::span<const double> zeta) {
  const int k1 = static_cast<int>(zeta.size());
  if (k1 < 1) throw ValidationError("zeta_to_beta: empty zeta");
  for (double z : zeta)
    if (!(z >= 0.0 && z <= 1.0)) throw ValidationError("zeta_to_beta: entries must lie in [0, 1]");
  if (zeta[k1 - 1] != 1.0) throw ValidationError("zeta_to_beta: final entry probability must be 1");
  std::vector<double> beta(k1);
  double used = 0.0;
  for (int j = 0; j < k1; ++j) {
    beta[j] = zeta[j] * (j == 0 ? 1.0 : 1.0 - used);
    used += beta[j];
  }
  return beta;
}

std::vector<double> beta_to_eta(std::span<const double> beta, int n_total, std::span<const int> n_per_period) {
  const int k1 = static_cast<int>(beta.size());
  if (static_cast<int>(n_per_period.size()) != k1)
    throw ValidationError("beta_to_eta: beta and n_per_period must both have length k1");
  std::vector<double> eta(k1 - 1);
  for (int r = 0; r + 1 < k1; ++r)
    eta[r] = n_per_period[r] > 0 ? beta[r + 1] * static_cast<double>(n_total) / n_per_period[r] : kNaN;
  return eta;
}

DemographicSummary make_demographic_summary(const AugmentedState& state, std::span<const double> zeta) {
  DemographicSummary s;
  s.n_total = 0;
  for (std::uint8_t w : state.included) s.n_total += w;
  s.n_per_period = derive_abundance(state);
  s.lifetime = derive_lifetime(state);
  s.beta = zeta_to_beta(zeta);
  s.eta = beta_to_eta(s.beta, s.n_total, s.n_per_period);
  return s;
}

}  // namespace crcdl
