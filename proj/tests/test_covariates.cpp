#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "crcdl/covariates.hpp"
#include "crcdl/design.hpp"
#include "crcdl/likelihood.hpp"
#include "crcdl/mathutil.hpp"
#include "crcdl/rng.hpp"

using namespace crcdl;

namespace {

double obs_term(double z, double lambda, double sigma_z, const CensorInterval& iv) {
  const std::vector<double> zs{z}, ls{lambda};
  const std::vector<CensorInterval> ivs{iv};
  return log_mass_obs(zs, ls, sigma_z, ivs);
}

// composite Simpson rule over the observation interval; the support is open,
// so inset the endpoints by a hair to stay off the -inf boundary
double integrate_obs_density(double lambda, double sigma_z, const CensorInterval& iv) {
  const double lo = iv.lo + 1e-9;
  const double hi = (std::isinf(iv.hi) ? std::max(lambda, lo) + 25.0 * sigma_z : iv.hi) - 1e-9;
  const int n = 20000;
  const double h = (hi - lo) / n;
  double acc = 0.0;
  for (int t = 0; t <= n; ++t) {
    const double z = lo + h * t;
    const double f = std::exp(obs_term(z, lambda, sigma_z, iv));
    acc += (t == 0 || t == n) ? f : (t % 2 ? 4.0 * f : 2.0 * f);
  }
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("censoring intervals encode rounding, pegging and absence") {
  auto iv = censoring_interval(true, 45.0, 60.0);
  CHECK(iv.lo == doctest::Approx(44.5));
  CHECK(iv.hi == doctest::Approx(45.5));

  iv = censoring_interval(true, 60.0, 60.0);
  CHECK(iv.lo == doctest::Approx(59.5));
  CHECK(std::isinf(iv.hi));

  iv = censoring_interval(false, std::nullopt, 60.0);
  CHECK(iv.lo == 0.0);
  CHECK(std::isinf(iv.hi));

  iv = censoring_interval(true, std::nullopt, 60.0);
  CHECK(iv.lo == 0.0);
  CHECK(std::isinf(iv.hi));

  iv = censoring_interval(true, 0.2, 60.0);
  CHECK(iv.lo == 0.0);
  CHECK(iv.hi == doctest::Approx(0.7));

  // anything at or above the scale maximum pegs; range checks live in ingest
  iv = censoring_interval(true, 61.0, 60.0);
  CHECK(iv.lo == doctest::Approx(59.5));
  CHECK(std::isinf(iv.hi));
}

TEST_CASE("truncated observation density at representative points") {
  CHECK(obs_term(45.0, 45.0, 1.0, {0.0, kInf}) == doctest::Approx(-0.9189385332046727).epsilon(1e-9));
  CHECK(obs_term(44.0, 45.0, 1.0, {44.5, 45.5}) == kNegInf);
  CHECK(obs_term(46.0, 45.0, 1.0, {44.5, 45.5}) == kNegInf);
  CHECK(obs_term(45.0, 45.0, 2.0, {kNegInf, kInf}) ==
        doctest::Approx(-0.5 * kLog2Pi - std::log(2.0)).epsilon(1e-12));

  // inside a narrow interval the normalization lifts the density above the plain pdf
  const double plain = log_normal_pdf(45.0, 45.0, 1.0);
  CHECK(obs_term(45.0, 45.0, 1.0, {44.5, 45.5}) > plain);
}

TEST_CASE("truncated observation densities integrate to one") {
  CHECK(integrate_obs_density(44.8, 1.3, {44.5, 45.5}) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(integrate_obs_density(58.0, 1.5, {59.5, kInf}) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(integrate_obs_density(30.0, 4.0, {0.0, kInf}) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(integrate_obs_density(62.0, 2.0, {59.5, kInf}) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("several observation records sum their factors") {
  const std::vector<double> zs{45.0, 50.0};
  const std::vector<double> ls{45.0, 49.0};
  const std::vector<CensorInterval> ivs{{44.5, 45.5}, {49.5, 50.5}};
  const double total = log_mass_obs(zs, ls, 1.0, ivs);
  CHECK(total == doctest::Approx(obs_term(45.0, 45.0, 1.0, ivs[0]) +
                                 obs_term(50.0, 49.0, 1.0, ivs[1]))
                     .epsilon(1e-12));
}

TEST_CASE("mass walk density is the entry factor plus drifted innovations") {
  MassProcessParams mp;
  mp.mu_lambda = 26.0;
  mp.sigma_lambda1 = 3.0;
  mp.Delta = {2.0};
  mp.sigma_lambda2 = 1.0;

  Grid2<double> lam(1, 2);
  lam(0, 0) = 30.0;
  lam(0, 1) = 32.0;
  const std::vector<int> first{0};

  const double total = log_mass_walk(lam, mp, first);
  const double entry = log_normal_pdf(30.0, 26.0, 3.0);
  CHECK(total - entry == doctest::Approx(-0.5 * kLog2Pi).epsilon(1e-12));

  lam(0, 1) = 33.0;  // 30 + drift 2 + 1
  CHECK(log_mass_walk(lam, mp, first) - entry ==
        doctest::Approx(-0.5 - 0.5 * kLog2Pi).epsilon(1e-12));

  const std::vector<int> unborn{2};
  CHECK(log_mass_walk(lam, mp, unborn) == 0.0);
}

TEST_CASE("entry period placement shifts which factor is the initial one") {
  MassProcessParams mp;
  mp.mu_lambda = 40.0;
  mp.sigma_lambda1 = 2.0;
  mp.Delta = {1.0, 1.0};
  mp.sigma_lambda2 = 0.5;

  Grid2<double> lam(1, 3);
  lam(0, 0) = 99.0;  // pre-entry cell, must not be read
  lam(0, 1) = 41.0;
  lam(0, 2) = 42.0;
  const std::vector<int> first{1};

  const double expected = log_normal_pdf(41.0, 40.0, 2.0) + log_normal_pdf(42.0, 42.0, 0.5);
  CHECK(log_mass_walk(lam, mp, first) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("standardization is plain centering and scaling") {
  CHECK(standardize_mass(40.0, 40.0, 10.0) == 0.0);
  CHECK(standardize_mass(50.0, 40.0, 10.0) == doctest::Approx(1.0));
  CHECK(standardize_mass(55.0, 40.0, 10.0) == doctest::Approx(1.5));
}

TEST_CASE("disease chain density multiplies entry and transition terms") {
  DiseaseProcessParams dp;
  dp.nu = {0.9, 0.1};
  dp.omega = {{{0.95, 0.05}, {0.3, 0.7}}};

  Grid2<int> z(1, 2, 1);
  const std::vector<int> first{0};
  const std::vector<std::uint8_t> w{1};
  CHECK(log_disease_process(z, dp.nu, dp.omega, first, w) ==
        doctest::Approx(std::log(0.9) + std::log(0.95)).epsilon(1e-14));

  DiseaseProcessParams det;
  det.nu = {1.0, 0.0};
  det.omega = {{{1.0, 0.0}, {0.5, 0.5}}};
  CHECK(log_disease_process(z, det.nu, det.omega, first, w) == 0.0);

  Grid2<int> flips(1, 2, 1);
  flips(0, 1) = 2;
  CHECK(log_disease_process(flips, det.nu, det.omega, first, w) == kNegInf);

  const std::vector<std::uint8_t> excluded{0};
  CHECK(log_disease_process(flips, det.nu, det.omega, first, excluded) == 0.0);

  const std::vector<int> unborn{2};
  CHECK(log_disease_process(flips, dp.nu, dp.omega, unborn, w) == 0.0);
}

TEST_CASE("covariate effects are the standardized mass and the disease indicator") {
  MassProcessParams mp;
  mp.lambda = Grid2<double>(2, 2);
  mp.lambda(0, 0) = 40.0;
  mp.lambda(0, 1) = 50.0;
  mp.lambda(1, 0) = 35.0;
  mp.lambda(1, 1) = 60.0;
  auto eff = covariate_effect(mp, 40.0, 10.0);
  CHECK(eff(0, 0) == 0.0);
  CHECK(eff(0, 1) == doctest::Approx(1.0));
  CHECK(eff(1, 0) == doctest::Approx(-0.5));

  DiseaseProcessParams dp;
  dp.z = Grid2<int>(1, 2, 1);
  dp.z(0, 1) = 2;
  auto deff = covariate_effect(dp);
  CHECK(deff(0, 0) == 0.0);
  CHECK(deff(0, 1) == 1.0);
}

TEST_CASE("simulated transitions match the transition matrix") {
  DiseaseProcessParams dp;
  dp.nu = {0.6, 0.4};
  dp.omega = {{{0.8, 0.2}, {0.4, 0.6}}};

  Rng rng(101);
  long from1 = 0, stay1 = 0, from2 = 0, stay2 = 0;
  int state = rng.bernoulli(dp.nu[1]) ? 2 : 1;
  for (int t = 0; t < 40000; ++t) {
    const int next = rng.bernoulli(dp.omega[state - 1][1]) ? 2 : 1;
    if (state == 1) {
      ++from1;
      stay1 += next == 1;
    } else {
      ++from2;
      stay2 += next == 2;
    }
    state = next;
  }
  CHECK(stay1 / double(from1) == doctest::Approx(0.8).epsilon(0.02));
  CHECK(stay2 / double(from2) == doctest::Approx(0.6).epsilon(0.02));
}

TEST_CASE("restandardizing and transforming coefficients preserves link probabilities") {
  StudyDesign des;
  des.k1 = 3;
  des.k2 = {1, 1, 1};
  des.M = 2;
  des.n_observed = 2;

  MassProcessParams mp;
  mp.lambda = Grid2<double>(2, 3);
  Rng rng(55);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) mp.lambda(i, j) = rng.uniform(20.0, 60.0);

  const double loc1 = 40.0, scale1 = 8.0, loc2 = 35.0, scale2 = 11.0;

  LinkParams a;
  a.alpha0 = 0.4;
  a.alpha1 = 1.3;
  a.gamma0 = -0.6;
  a.gamma1 = 0.9;
  a.eta_S = {0.1, -0.2};
  a.eta_p = {0.05, -0.15, 0.2};

  LinkParams b = a;
  b.alpha1 = a.alpha1 * scale2 / scale1;
  b.alpha0 = a.alpha0 + a.alpha1 * (loc2 - loc1) / scale1;
  b.gamma1 = a.gamma1 * scale2 / scale1;
  b.gamma0 = a.gamma0 + a.gamma1 * (loc2 - loc1) / scale1;

  auto pa = link_probabilities(a, covariate_effect(mp, loc1, scale1), des, false);
  auto pb = link_probabilities(b, covariate_effect(mp, loc2, scale2), des, false);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(pa.surv(i, j) == doctest::Approx(pb.surv(i, j)).epsilon(1e-12));
    for (int j = 0; j < 3; ++j) CHECK(pa.p(i, j) == doctest::Approx(pb.p(i, j)).epsilon(1e-12));
  }
}
