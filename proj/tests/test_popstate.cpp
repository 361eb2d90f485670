#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crcdl/popstate.hpp"
#include "crcdl/rng.hpp"

using namespace crcdl;

namespace {

AugmentedState state_from_rows(const std::vector<std::vector<int>>& born,
                               const std::vector<std::vector<int>>& not_dead,
                               const std::vector<int>& included) {
  const int M = static_cast<int>(born.size());
  const int k1 = static_cast<int>(born[0].size());
  AugmentedState s(M, k1);
  for (int i = 0; i < M; ++i) {
    s.included[i] = static_cast<std::uint8_t>(included[i]);
    for (int j = 0; j < k1; ++j) {
      s.born(i, j) = static_cast<std::uint8_t>(born[i][j]);
      s.not_dead(i, j) = static_cast<std::uint8_t>(not_dead[i][j]);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("abundance counts alive included individuals per period") {
  AugmentedState s(2, 3);
  s.set_trajectory(0, 0, 2);
  s.set_trajectory(1, 0, 2);
  CHECK(derive_abundance(s) == std::vector<int>{2, 2, 2});

  auto t = state_from_rows({{1, 1}, {0, 1}}, {{1, 0}, {1, 1}}, {1, 1});
  CHECK(derive_abundance(t) == std::vector<int>{1, 1});

  t.included[1] = 0;
  CHECK(derive_abundance(t) == std::vector<int>{1, 0});
}

TEST_CASE("lifetime counts periods with both indicators set") {
  auto s = state_from_rows({{1, 1, 1}, {0, 1, 1}, {0, 0, 0}},
                           {{1, 1, 1}, {1, 1, 0}, {1, 1, 1}}, {1, 1, 1});
  CHECK(derive_lifetime(s) == std::vector<int>{3, 1, 0});
}

TEST_CASE("zeta_to_beta recursion") {
  CHECK(zeta_to_beta(std::vector<double>{1.0, 0.4, 1.0}) == std::vector<double>{1.0, 0.0, 0.0});

  auto b = zeta_to_beta(std::vector<double>{0.5, 0.5, 1.0});
  REQUIRE(b.size() == 3);
  CHECK(b[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(b[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(b[2] == doctest::Approx(0.25).epsilon(1e-14));

  CHECK(zeta_to_beta(std::vector<double>{0.0, 0.0, 1.0}) == std::vector<double>{0.0, 0.0, 1.0});
}

TEST_CASE("zeta_to_beta requires terminal entry probability one") {
  CHECK_THROWS_AS((void)zeta_to_beta(std::vector<double>{0.5, 0.9}), ValidationError);
}

TEST_CASE("random entry probabilities give a simplex") {
  Rng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    const int k1 = 2 + static_cast<int>(rng.uniform() * 7);
    std::vector<double> zeta(k1);
    for (int j = 0; j < k1 - 1; ++j) zeta[j] = rng.uniform();
    zeta[k1 - 1] = 1.0;
    auto beta = zeta_to_beta(zeta);
    double total = 0.0;
    for (double v : beta) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("beta_to_eta per capita rates") {
  std::vector<double> beta{0.5, 0.25, 0.25};
  std::vector<int> n{50, 40, 30};

  auto eta = beta_to_eta(beta, 100, n);
  REQUIRE(eta.size() == 2);
  CHECK(eta[0] == doctest::Approx(0.5).epsilon(1e-14));

  beta[1] = 0.0;
  eta = beta_to_eta(beta, 100, n);
  CHECK(eta[0] == 0.0);

  beta[1] = 0.25;
  n[0] = 0;
  eta = beta_to_eta(beta, 100, n);
  CHECK(std::isnan(eta[0]));
}

TEST_CASE("state validation rejects broken rows") {
  AugmentedState ok(2, 3);
  ok.set_trajectory(0, 1, 2);
  ok.set_trajectory(1, 0, 0);
  CHECK_NOTHROW(ok.validate());

  AugmentedState demoted = ok;
  demoted.born(0, 1) = 1;
  demoted.born(0, 2) = 0;
  CHECK_THROWS_AS(demoted.validate(), ValidationError);

  AugmentedState risen = ok;
  risen.not_dead(1, 1) = 0;
  risen.not_dead(1, 2) = 1;
  CHECK_THROWS_AS(risen.validate(), ValidationError);

  AugmentedState early_death = ok;
  early_death.not_dead(0, 0) = 0;
  CHECK_THROWS_AS(early_death.validate(), ValidationError);
}

TEST_CASE("set_trajectory rewrites one row consistently") {
  AugmentedState s(1, 5);
  s.set_trajectory(0, 2, 3);
  CHECK(s.first_alive(0) == 2);
  CHECK(s.last_alive(0) == 3);
  CHECK_FALSE(s.alive(0, 1));
  CHECK(s.alive(0, 2));
  CHECK(s.alive(0, 3));
  CHECK_FALSE(s.alive(0, 4));
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("abundance never exceeds the inclusion count") {
  Rng rng(77);
  for (int rep = 0; rep < 100; ++rep) {
    const int M = 1 + static_cast<int>(rng.uniform() * 20);
    const int k1 = 2 + static_cast<int>(rng.uniform() * 6);
    AugmentedState s(M, k1);
    int n_total = 0;
    for (int i = 0; i < M; ++i) {
      const int b = static_cast<int>(rng.uniform() * k1);
      const int d = b + static_cast<int>(rng.uniform() * (k1 - b));
      s.set_trajectory(i, b, d);
      s.included[i] = rng.bernoulli(0.6) ? 1 : 0;
      n_total += s.included[i];
    }
    for (int count : derive_abundance(s)) CHECK(count <= n_total);
  }
}

TEST_CASE("demographic summary bundles the derived quantities") {
  AugmentedState s(3, 3);
  s.set_trajectory(0, 0, 2);
  s.set_trajectory(1, 1, 2);
  s.set_trajectory(2, 0, 0);
  s.included[2] = 0;

  const std::vector<double> zeta{0.5, 0.5, 1.0};
  auto d = make_demographic_summary(s, zeta);
  CHECK(d.n_total == 2);
  CHECK(d.n_per_period == std::vector<int>{1, 2, 2});
  CHECK(d.lifetime == std::vector<int>{3, 2, 1});
  CHECK(d.beta[0] == doctest::Approx(0.5));
  CHECK(d.eta[0] == doctest::Approx(0.25 * 2.0 / 1.0));
}
