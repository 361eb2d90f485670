#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "crcdl/mathutil.hpp"
#include "crcdl/rng.hpp"

using namespace crcdl;

TEST_CASE("identical seeds give identical streams, distinct seeds differ") {
  Rng a(42), b(42), c(43);
  bool any_diff = false;
  for (int t = 0; t < 200; ++t) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    if (x != c.uniform()) any_diff = true;
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(any_diff);
}

TEST_CASE("derived chain seeds are distinct and deterministic") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("sampling moments match their distributions") {
  Rng rng(7);
  const int n = 200000;

  double su = 0.0, su2 = 0.0, sn = 0.0, sn2 = 0.0;
  for (int t = 0; t < n; ++t) {
    const double u = rng.uniform();
    const double z = rng.normal(0.0, 1.0);
    su += u;
    su2 += u * u;
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(su2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));

  double sb = 0.0, sg = 0.0;
  for (int t = 0; t < n / 4; ++t) {
    sb += rng.beta(2.0, 3.0);
    sg += rng.gamma(3.0);
  }
  CHECK(sb / (n / 4) == doctest::Approx(0.4).epsilon(0.02));
  CHECK(sg / (n / 4) == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("dirichlet draws are simplex points with the right means") {
  Rng rng(11);
  const std::vector<double> conc{2.0, 3.0, 5.0};
  std::vector<double> out(3), acc(3, 0.0);
  const int n = 50000;
  for (int t = 0; t < n; ++t) {
    rng.dirichlet(conc, out);
    double total = 0.0;
    for (double v : out) total += v;
    CHECK(std::abs(total - 1.0) <= 1e-12);
    for (int k = 0; k < 3; ++k) acc[k] += out[k];
  }
  CHECK(acc[0] / n == doctest::Approx(0.2).epsilon(0.03));
  CHECK(acc[1] / n == doctest::Approx(0.3).epsilon(0.03));
  CHECK(acc[2] / n == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("categorical_logw follows normalized weights") {
  Rng rng(13);
  const std::vector<double> logw{std::log(0.1), std::log(0.3), std::log(0.6)};
  std::vector<int> counts(3, 0);
  const int n = 60000;
  for (int t = 0; t < n; ++t) ++counts[rng.categorical_logw(logw)];
  CHECK(counts[0] / double(n) == doctest::Approx(0.1).epsilon(0.08));
  CHECK(counts[1] / double(n) == doctest::Approx(0.3).epsilon(0.05));
  CHECK(counts[2] / double(n) == doctest::Approx(0.6).epsilon(0.05));

  const std::vector<double> shifted{1000.0, 1000.0 + std::log(2.0)};
  int ones = 0;
  for (int t = 0; t < n; ++t) ones += rng.categorical_logw(shifted);
  CHECK(ones / double(n) == doctest::Approx(2.0 / 3.0).epsilon(0.05));
}

TEST_CASE("truncated normal respects its bounds and matches moments") {
  Rng rng(17);
  double acc = 0.0;
  const int n = 50000;
  for (int t = 0; t < n; ++t) {
    const double x = rng.truncated_normal(0.0, 1.0, 1.0, 2.0);
    CHECK(x >= 1.0);
    CHECK(x <= 2.0);
    acc += x;
  }
  const double phi1 = std::exp(-0.5 - 0.5 * kLog2Pi);
  const double phi2 = std::exp(-2.0 - 0.5 * kLog2Pi);
  const double mass = normal_cdf(2.0) - normal_cdf(1.0);
  CHECK(acc / n == doctest::Approx((phi1 - phi2) / mass).epsilon(0.01));

  for (int t = 0; t < 2000; ++t) {
    CHECK(rng.truncated_normal(50.0, 2.0, 59.5, kInf) >= 59.5);
    CHECK(rng.truncated_normal(0.0, 1.0, -kInf, -3.0) <= -3.0);
  }
}

TEST_CASE("normal cdf and logit primitives") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(normal_cdf(-8.0) == doctest::Approx(6.22096e-16).epsilon(1e-3));

  CHECK(invlogit(0.0) == doctest::Approx(0.5));
  CHECK(invlogit(2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-14));
  CHECK(log_invlogit(-40.0) == doctest::Approx(-40.0).epsilon(1e-12));
  CHECK(log1m_invlogit(40.0) == doctest::Approx(-40.0).epsilon(1e-12));

  CHECK(log_normal_pdf(0.0, 0.0, 1.0) == doctest::Approx(-0.9189385332046727).epsilon(1e-14));
  CHECK(log_normal_pdf(3.0, 1.0, 2.0) ==
        doctest::Approx(-0.5 - std::log(2.0) - 0.9189385332046727).epsilon(1e-12));
}

TEST_CASE("normal interval masses agree with cdf differences everywhere") {
  const std::vector<std::pair<double, double>> cases{
      {-2.5, -1.5}, {-1.5, 2.0}, {0.5, 1.25}, {-0.25, 0.0}, {0.0, 0.75}, {-6.0, -5.0}, {5.0, 6.0}};
  for (auto [a, b] : cases) {
    const double direct = std::log(normal_cdf(b) - normal_cdf(a));
    CHECK(normal_interval_logmass(a, b) == doctest::Approx(direct).epsilon(1e-9));
    CHECK(normal_interval_logmass(a, b) == doctest::Approx(normal_interval_logmass(-b, -a)).epsilon(1e-12));
  }
  CHECK(normal_interval_logmass(-kInf, kInf) == doctest::Approx(0.0));
  CHECK(normal_interval_logmass(2.0, kInf) ==
        doctest::Approx(std::log(1.0 - normal_cdf(2.0))).epsilon(1e-9));
  CHECK(normal_interval_logmass(-kInf, -2.0) ==
        doctest::Approx(std::log(normal_cdf(-2.0))).epsilon(1e-9));
  CHECK(normal_interval_logmass(1.0, 1.0) == -kInf);
  CHECK(normal_interval_logmass(2.0, 1.0) == -kInf);

  // a right-tail interval whose naive cdf difference rounds to zero
  const double deep = normal_interval_logmass(19.0, 20.0);
  CHECK(std::isfinite(deep));
  CHECK(deep == doctest::Approx(normal_interval_logmass(-20.0, -19.0)).epsilon(1e-12));
  CHECK(deep < normal_interval_logmass(5.0, 6.0));
}

TEST_CASE("logsumexp handles spread and degenerate inputs") {
  const std::vector<double> x{std::log(0.25), std::log(0.5), std::log(0.25)};
  CHECK(logsumexp(x) == doctest::Approx(0.0).epsilon(1e-14));
  const std::vector<double> shifted{-1000.0, -1000.0};
  CHECK(logsumexp(shifted) == doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-12));
  const std::vector<double> none{-kInf, -kInf};
  CHECK(logsumexp(none) == -kInf);
}

TEST_CASE("quantiles interpolate order statistics") {
  std::vector<double> v(100);
  for (int t = 0; t < 100; ++t) v[t] = t + 1.0;
  CHECK(quantile_sorted(v, 0.5) == doctest::Approx(50.5).epsilon(1e-14));
  CHECK(quantile_sorted(v, 0.025) == doctest::Approx(3.475).epsilon(1e-14));
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 100.0);

  std::vector<double> two{0.0, 0.0, 1.0, 1.0};
  CHECK(quantile_sorted(two, 0.5) == doctest::Approx(0.5));

  std::vector<double> scrambled{4.0, 1.0, 3.0, 2.0};
  CHECK(quantile(scrambled, 0.5) == doctest::Approx(2.5));
}
