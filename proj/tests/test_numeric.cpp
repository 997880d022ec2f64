#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "zap/numeric.hpp"
#include "zap/rng.hpp"

using namespace zap;

TEST_CASE("normal cdf and pdf reference values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  // Expected values frozen from the long-double series oracle.
  CHECK(std::abs(normal_cdf(1.959964) -
                 static_cast<double>(test_oracles::normal_cdf_series(1.959964L))) <
        1e-14);
  CHECK(normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989423).epsilon(1e-7));
  CHECK(normal_pdf(1.0) ==
        doctest::Approx(std::exp(-0.5) * kInvSqrt2Pi).epsilon(1e-15));
}

TEST_CASE("normal cdf matches the series oracle on a grid") {
  for (int k = -80; k <= 80; ++k) {
    const double z = 0.1 * k;
    const long double ref = test_oracles::normal_cdf_series(z);
    CHECK(std::abs(normal_cdf(z) - static_cast<double>(ref)) <=
          1e-14 * std::max(1.0, std::abs(static_cast<double>(ref))));
  }
}

TEST_CASE("normal quantile round trips") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);

  // Direct round trip; the upper tail beyond ~6 loses precision to the
  // binary representation of p near one, so it is checked through the
  // symmetric composition below.
  Rng rng(42);
  for (int i = 0; i < 100000; ++i) {
    const double z = rng.uniform(-8.0, 6.0);
    const double back = normal_quantile(normal_cdf(z));
    CHECK(std::abs(back - z) <= 1e-8 * (1.0 + std::abs(z)));
  }
  // Tail-preserving composition covers the full range [-8, 8].
  for (int i = 0; i < 100000; ++i) {
    const double z = rng.uniform(-8.0, 8.0);
    const double back = z <= 0.0 ? normal_quantile(normal_cdf(z))
                                 : -normal_quantile(normal_cdf(-z));
    CHECK(std::abs(back - z) <= 1e-8 * (1.0 + std::abs(z)));
  }
}

TEST_CASE("log beta against half-integer gamma identities") {
  CHECK(log_beta(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  // B(0.5, 4) = Gamma(0.5) Gamma(4) / Gamma(4.5) = 6 / (3.5 * 2.5 * 1.5 * 0.5)
  const double ref = 6.0 / (3.5 * 2.5 * 1.5 * 0.5);
  CHECK(std::exp(log_beta(0.5, 4.0)) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(std::exp(log_beta(0.5, 4.0)) ==
        doctest::Approx(0.9142857).epsilon(1e-6));
  CHECK(log_beta(0.5, 4.0) == doctest::Approx(log_beta(4.0, 0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(log_beta(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(log_beta(1.0, -2.0), std::domain_error);
}

TEST_CASE("exp(log beta) matches quadrature on a grid") {
  const double as[] = {0.1, 0.35, 0.6, 0.85, 0.95};
  const double bs[] = {2.5, 4.0};
  for (double a : as) {
    for (double b : bs) {
      const double integral =
          test_oracles::integrate_unit_interval([&](double u, double omu) {
            return std::pow(u, a - 1.0) * std::pow(omu, b - 1.0);
          });
      CHECK(std::exp(log_beta(a, b)) ==
            doctest::Approx(integral).epsilon(1e-6));
    }
  }
}

TEST_CASE("digamma and trigamma") {
  const double gamma_const = static_cast<double>(test_oracles::euler_gamma());
  CHECK(digamma(1.0) == doctest::Approx(-gamma_const).epsilon(1e-12));
  CHECK(digamma(1.0) == doctest::Approx(-0.5772157).epsilon(1e-6));
  // Recurrence psi(x+1) = psi(x) + 1/x.
  for (double x : {0.2, 0.7, 1.3, 3.9, 11.0}) {
    CHECK(digamma(x + 1.0) ==
          doctest::Approx(digamma(x) + 1.0 / x).epsilon(1e-12));
    CHECK(trigamma(x + 1.0) ==
          doctest::Approx(trigamma(x) - 1.0 / (x * x)).epsilon(1e-12));
  }
  // trigamma(1) = pi^2 / 6.
  CHECK(trigamma(1.0) ==
        doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-12));
  // trigamma is the derivative of digamma (central differences).
  for (double x : {0.4, 1.7, 6.2}) {
    const double h = 1e-6;
    const double fd = (digamma(x + h) - digamma(x - h)) / (2.0 * h);
    CHECK(trigamma(x) == doctest::Approx(fd).epsilon(1e-6));
  }
  CHECK_THROWS_AS(digamma(0.0), std::domain_error);
  CHECK_THROWS_AS(trigamma(-1.0), std::domain_error);
}

TEST_CASE("empirical quantiles") {
  const EmpiricalSample tri({1.0, 2.0, 3.0});
  CHECK(tri.quantile(0.5) == doctest::Approx(2.0));
  CHECK(tri.quantile(0.0) == doctest::Approx(1.0));
  CHECK(tri.quantile(1.0) == doctest::Approx(3.0));

  const EmpiricalSample two({0.0, 10.0});
  CHECK(two.quantile(0.25) == doctest::Approx(2.5));

  const EmpiricalSample constant({5.0, 5.0, 5.0});
  for (double q : {0.0, 0.17, 0.5, 0.99, 1.0}) {
    CHECK(constant.quantile(q) == doctest::Approx(5.0));
  }

  CHECK_THROWS_AS(EmpiricalSample(std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(tri.quantile(-0.1), std::domain_error);
  CHECK_THROWS_AS(tri.quantile(1.1), std::domain_error);
}

TEST_CASE("quantile reproduces elements at plotting positions") {
  Rng rng(7);
  std::vector<double> values;
  for (int i = 0; i < 57; ++i) values.push_back(rng.normal());
  const EmpiricalSample sample(values);
  const std::size_t n = sample.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double q = static_cast<double>(j) / static_cast<double>(n - 1);
    CHECK(sample.quantile(q) ==
          doctest::Approx(sample.values()[j]).epsilon(1e-12));
  }
}

TEST_CASE("ecdf convention") {
  const EmpiricalSample s({1.0, 2.0, 2.0, 4.0});
  CHECK(s.ecdf_leq(0.5) == doctest::Approx(0.0));
  CHECK(s.ecdf_leq(1.0) == doctest::Approx(0.25));
  CHECK(s.ecdf_leq(2.0) == doctest::Approx(0.75));
  CHECK(s.ecdf_leq(5.0) == doctest::Approx(1.0));
}

TEST_CASE("clamp_unit") {
  CHECK(clamp_unit(0.3) == doctest::Approx(0.3));
  CHECK(clamp_unit(0.0) == kEpsU);
  CHECK(clamp_unit(1.0) == 1.0 - kEpsU);
  CHECK(clamp_unit(-5.0) == kEpsU);
}
