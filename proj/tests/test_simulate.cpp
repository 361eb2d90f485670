#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "crcdl/covariates.hpp"
#include "crcdl/design.hpp"
#include "crcdl/likelihood.hpp"
#include "crcdl/mathutil.hpp"
#include "crcdl/simulate.hpp"

using namespace crcdl;

namespace {

SimParams tiny_params() {
  SimParams p;
  p.model = ModelKind::standard;
  p.covariate = CovariateKind::none;
  p.design.k1 = 3;
  p.design.k2.assign(3, 1);
  p.design.M = 30;
  p.zeta = {1.0, 0.5, 1.0};
  return p;
}

int row_to_pool_index(const std::string& id) { return std::stoi(id.substr(2)) - 1; }

}  // namespace

TEST_CASE("saturated parameters observe the whole pool at every occasion") {
  SimParams p = tiny_params();
  p.psi = 1.0;
  p.zeta = {1.0, 1.0, 1.0};
  p.alpha0 = 50.0;
  p.gamma0 = 50.0;

  auto [data, truth] = generate(p, 42);
  CHECK(truth.n_total == 30);
  CHECK(truth.n_observed == 30);
  CHECK(data.design.n_observed == 30);
  REQUIRE(truth.n_per_period.size() == 3);
  for (int j = 0; j < 3; ++j) CHECK(truth.n_per_period[j] == 30);
  for (int r = 0; r < 30; ++r) {
    CHECK(data.first_capture[r] == 0);
    CHECK(data.last_capture[r] == 2);
    for (int j = 0; j < 3; ++j) CHECK(data.captures(r, j, 0) == 1);
  }
  CHECK(data.ids[0] == "id01");
  CHECK(data.ids[29] == "id30");
}

TEST_CASE("a hopeless capture rate observes nobody but the truth is intact") {
  SimParams p = tiny_params();
  p.gamma0 = -50.0;
  auto [data, truth] = generate(p, 42);
  CHECK(truth.n_observed == 0);
  CHECK(data.design.n_observed == 0);
  CHECK(data.ids.empty());
  CHECK(truth.n_total > 0);
  truth.state.validate();
}

TEST_CASE("generation is reproducible and seed-sensitive") {
  SimParams p = vole_preset();
  p.design.M = 120;
  auto [d1, t1] = generate(p, 7);
  auto [d2, t2] = generate(p, 7);
  CHECK(d1.ids == d2.ids);
  CHECK(d1.captures == d2.captures);
  CHECK(t1.state.born == t2.state.born);
  CHECK(t1.state.not_dead == t2.state.not_dead);
  CHECK(t1.lambda == t2.lambda);
  CHECK(t1.n_total == t2.n_total);
  REQUIRE(d1.mass.size() == d2.mass.size());
  for (std::size_t r = 0; r < d1.mass.size(); ++r) {
    CHECK(d1.mass[r].z_obs == d2.mass[r].z_obs);
    CHECK(d1.mass[r].censored == d2.mass[r].censored);
  }

  auto [d3, t3] = generate(p, 8);
  CHECK((t3.state.born != t1.state.born || d3.captures != d1.captures));
}

TEST_CASE("truth and data agree row by row on a robust mass study") {
  SimParams p = vole_preset();
  auto [data, truth] = generate(p, 19);
  truth.state.validate();

  CHECK(truth.n_per_period == derive_abundance(truth.state));
  int included = 0;
  for (auto w : truth.state.included) included += w;
  CHECK(truth.n_total == included);
  CHECK(truth.n_observed == static_cast<int>(data.ids.size()));
  CHECK(data.design.M == truth.n_observed);

  for (int r = 0; r < data.design.n_observed; ++r) {
    const int i = row_to_pool_index(data.ids[r]);
    CHECK(truth.state.included[i] == 1);
    for (int j = 0; j < data.design.k1; ++j)
      for (int l = 0; l < data.design.k2[j]; ++l)
        if (data.captures(r, j, l)) CHECK(truth.state.alive(i, j));
  }

  CHECK_FALSE(data.mass.empty());
  for (const MassRecord& m : data.mass) {
    CHECK(data.captures(m.i, m.j, m.l) == 1);
    CHECK(m.z_obs >= 1.0);
    CHECK(m.z_obs <= p.mass_max);
    CHECK(m.censored == (m.z_obs == p.mass_max));
  }
}

TEST_CASE("the complete data likelihood is finite at the generating truth") {
  SimParams p = vole_preset();
  auto [data, truth] = generate(p, 23);
  const int M = p.design.M;
  const int k1 = p.design.k1;

  LinkParams link;
  link.alpha0 = p.alpha0;
  link.alpha1 = p.alpha1;
  link.gamma0 = p.gamma0;
  link.gamma1 = p.gamma1;
  link.eta_S = truth.eta_S;
  link.eta_p = truth.eta_p;
  link.eps_p = truth.eps_p;

  MassProcessParams mp;
  mp.mu_lambda = p.mu_lambda;
  mp.sigma_lambda1 = p.sigma_lambda1;
  mp.Delta = p.Delta;
  mp.sigma_lambda2 = p.sigma_lambda2;
  mp.sigma_z = p.sigma_z;

  Grid2<double> effect(M, k1);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < k1; ++j) effect(i, j) = standardize_mass(truth.lambda(i, j), p.mass_loc, p.mass_scale);
  StudyDesign pool = p.design;
  pool.n_observed = truth.n_observed;
  auto probs = link_probabilities(link, effect, pool, true);

  // scatter the exported rows back over the pool; unexported rows are all zero
  Grid3<std::uint8_t> caps(M, k1, pool.max_k2(), 0);
  for (int r = 0; r < data.design.n_observed; ++r) {
    const int i = row_to_pool_index(data.ids[r]);
    for (int j = 0; j < k1; ++j)
      for (int l = 0; l < data.design.k2[j]; ++l) caps(i, j, l) = data.captures(r, j, l);
  }

  std::vector<int> first(M);
  for (int i = 0; i < M; ++i) first[i] = truth.state.first_alive(i);

  double total = log_birth(truth.state.born, truth.state.included, p.zeta);
  total += log_mortality(truth.state.not_dead, truth.state.born, truth.state.included, probs.surv);
  total += log_capture_robust(caps, truth.state.born, truth.state.not_dead, truth.state.included,
                              probs.p_robust, pool.k2);
  total += log_mass_walk(truth.lambda, mp, first);

  std::vector<double> z_latent, lambda_at;
  std::vector<CensorInterval> ivs;
  for (const MassRecord& m : data.mass) {
    const int i = row_to_pool_index(data.ids[m.i]);
    z_latent.push_back(m.z_obs);
    lambda_at.push_back(truth.lambda(i, m.j));
    ivs.push_back(censoring_interval(true, m.z_obs, p.mass_max));
  }
  total += log_mass_obs(z_latent, lambda_at, p.sigma_z, ivs);

  CHECK(std::isfinite(total));
}

TEST_CASE("entry and inclusion frequencies track their probabilities") {
  SimParams p = tiny_params();
  p.design.M = 2000;
  p.psi = 0.5;
  p.zeta = {0.3, 0.4, 1.0};
  auto [data, truth] = generate(p, 99);

  int entered_first = 0, included = 0;
  for (int i = 0; i < 2000; ++i) {
    entered_first += truth.state.first_alive(i) == 0;
    included += truth.state.included[i];
  }
  CHECK(entered_first / 2000.0 == doctest::Approx(0.3).epsilon(0.14));
  CHECK(included / 2000.0 == doctest::Approx(0.5).epsilon(0.09));
}

TEST_CASE("categorical truth splits abundance by state") {
  SimParams p = finch_preset();
  p.design.M = 400;
  auto [data, truth] = generate(p, 31);
  truth.state.validate();
  REQUIRE(truth.n_per_state.rows() == 2);
  for (int j = 0; j < p.design.k1; ++j)
    CHECK(truth.n_per_state(0, j) + truth.n_per_state(1, j) == truth.n_per_period[j]);

  for (int r = 0; r < data.design.n_observed; ++r) {
    const int i = row_to_pool_index(data.ids[r]);
    for (int j = 0; j < p.design.k1; ++j) {
      const bool seen = data.captures_in_period(r, j) > 0;
      CHECK((data.state_obs(r, j) != 0) == seen);
      if (seen) CHECK(data.state_obs(r, j) == truth.zstate(i, j));
    }
  }
}

TEST_CASE("masking is a no-op at rate zero and total at rate one") {
  SimParams p = finch_preset();
  p.design.M = 300;
  auto [data, truth] = generate(p, 57);

  auto untouched = data;
  mask_disease(untouched, 0.0, 5);
  CHECK(untouched.state_obs == data.state_obs);

  auto blanked = data;
  mask_disease(blanked, 1.0, 5);
  for (int i = 0; i < blanked.state_obs.rows(); ++i)
    for (int j = 0; j < blanked.state_obs.cols(); ++j) CHECK(blanked.state_obs(i, j) == 0);

  auto partial = data;
  mask_disease(partial, 0.3, 5);
  int known = 0, masked = 0;
  for (int i = 0; i < data.state_obs.rows(); ++i)
    for (int j = 0; j < data.state_obs.cols(); ++j) {
      if (data.state_obs(i, j) == 0) continue;
      ++known;
      masked += partial.state_obs(i, j) == 0;
    }
  REQUIRE(known > 300);
  const double se = std::sqrt(0.3 * 0.7 / known);
  CHECK(masked / double(known) == doctest::Approx(0.3).epsilon(4.0 * se / 0.3));
}

TEST_CASE("masking rejects data and rates it cannot apply to") {
  SimParams p = vole_preset();
  p.design.M = 40;
  auto [data, truth] = generate(p, 3);
  CHECK_THROWS_AS(mask_disease(data, 0.5, 1), ValidationError);

  SimParams q = finch_preset();
  q.design.M = 50;
  auto [cat, ct] = generate(q, 3);
  CHECK_THROWS_AS(mask_disease(cat, -0.1, 1), ValidationError);
  CHECK_THROWS_AS(mask_disease(cat, 1.5, 1), ValidationError);
}

TEST_CASE("generation validates its inputs") {
  SimParams p = tiny_params();
  p.zeta = {0.5, 0.5};
  CHECK_THROWS_AS((void)generate(p, 1), ValidationError);

  p = tiny_params();
  p.zeta = {0.5, 0.5, 0.9};
  CHECK_THROWS_AS((void)generate(p, 1), ValidationError);

  p = tiny_params();
  p.model = ModelKind::standard;
  p.design.k2.assign(3, 2);
  CHECK_THROWS_AS((void)generate(p, 1), ValidationError);

  p = vole_preset();
  p.Delta = {1.0};
  CHECK_THROWS_AS((void)generate(p, 1), ValidationError);
}
