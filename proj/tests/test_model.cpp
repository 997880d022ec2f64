#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "zap/model.hpp"
#include "zap/rng.hpp"

using namespace zap;

namespace {

BetaMixtureParams random_params(Rng& rng, std::size_t p) {
  BetaMixtureParams params;
  auto draw = [&](double lo, double hi) { return rng.uniform(lo, hi); };
  params.theta_l.push_back(draw(-2.5, 0.5));
  params.theta_r.push_back(draw(-2.5, 0.5));
  params.beta_l.push_back(draw(-2.0, 2.0));
  params.beta_r.push_back(draw(-2.0, 2.0));
  for (std::size_t j = 0; j < p; ++j) {
    params.theta_l.push_back(draw(-1.0, 1.0));
    params.theta_r.push_back(draw(-1.0, 1.0));
    params.beta_l.push_back(draw(-1.0, 1.0));
    params.beta_r.push_back(draw(-1.0, 1.0));
  }
  params.gamma_l = draw(2.5, 8.0);
  params.gamma_r = draw(2.5, 8.0);
  return params;
}

BetaMixtureParams swap_sides(const BetaMixtureParams& params) {
  BetaMixtureParams out = params;
  std::swap(out.theta_l, out.theta_r);
  std::swap(out.beta_l, out.beta_r);
  std::swap(out.gamma_l, out.gamma_r);
  return out;
}

}  // namespace

TEST_CASE("link_probabilities") {
  const std::vector<double> zero{0.0};
  SUBCASE("equal exponents give thirds") {
    auto [pl, pr] = link_probabilities(zero, zero, {});
    CHECK(pl == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(pr == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("large negative intercept vanishes one side") {
    auto [pl, pr] = link_probabilities({-50.0}, zero, {});
    CHECK(pl < 1e-12);
    CHECK(pr == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("softmax evaluation") {
    auto [pl, pr] = link_probabilities({1.0}, zero, {});
    CHECK(pl == doctest::Approx(std::exp(1.0) / (2.0 + std::exp(1.0)))
                    .epsilon(1e-12));
    CHECK(pl == doctest::Approx(0.57611).epsilon(1e-4));
    CHECK(pr == doctest::Approx(0.21194).epsilon(1e-4));
  }
  SUBCASE("dimension mismatch") {
    const std::vector<double> x{1.0, 2.0};
    CHECK_THROWS_AS(link_probabilities(zero, zero, x), std::invalid_argument);
  }
}

TEST_CASE("link_shape") {
  CHECK(link_shape({0.0}, {}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(link_shape({std::log(3.0)}, {}) == doctest::Approx(0.75).epsilon(1e-12));
  const std::vector<double> x{-50.0};
  const double k = link_shape({0.0, 1.0}, x);
  CHECK(k > 0.0);
  CHECK(k == doctest::Approx(1.0 / (1.0 + std::exp(35.0))).epsilon(1e-9));
  CHECK_THROWS_AS(link_shape({0.0}, x), std::invalid_argument);
}

TEST_CASE("beta component density") {
  const auto u = UnitInterval::clamped(0.5);
  // (k, gamma) = (0.5, 4): u^{-1/2}(1-u)^3 / B(0.5, 4) at u = 1/2.
  const double ref = std::sqrt(2.0) * 0.125 / (6.0 / (3.5 * 2.5 * 1.5 * 0.5));
  CHECK(beta_component_density(u, 0.5, 4.0, Side::kLeft) ==
        doctest::Approx(ref).epsilon(1e-10));
  CHECK(beta_component_density(u, 0.5, 4.0, Side::kLeft) ==
        doctest::Approx(0.19335).epsilon(1e-3));
  // Mirror symmetry at the midpoint.
  CHECK(beta_component_density(u, 0.5, 4.0, Side::kRight) ==
        doctest::Approx(beta_component_density(u, 0.5, 4.0, Side::kLeft))
            .epsilon(1e-12));
  // The left component vanishes at the right endpoint.
  CHECK(beta_component_density(UnitInterval::clamped(1.0 - 1e-9), 0.5, 4.0,
                               Side::kLeft) < 1e-20);
  CHECK_THROWS_AS(beta_component_density(u, 1.5, 4.0, Side::kLeft),
                  std::domain_error);
  CHECK_THROWS_AS(beta_component_density(u, 0.5, 1.5, Side::kLeft),
                  std::domain_error);
}

TEST_CASE("working density and assessor") {
  SUBCASE("pure uniform null") {
    const auto params = BetaMixtureParams::intercept_init(0, 1e-18, 0.5, 4, 4);
    BetaMixtureParams null_params = params;
    null_params.theta_l[0] = null_params.theta_r[0] = -50.0;
    for (double uv : {0.01, 0.3, 0.77, 0.999}) {
      CHECK(working_density(UnitInterval::clamped(uv), null_params, {}) ==
            doctest::Approx(1.0).epsilon(1e-12));
      CHECK(assessor_eval(UnitInterval::clamped(uv), null_params, {}) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("composition of verified pieces") {
    // Intercepts chosen so pi_l = pi_r = 1/4, k = 1/2 with gamma = 4.
    auto params = BetaMixtureParams::intercept_init(0, 0.25, 0.5, 4, 4);
    const auto u = UnitInterval::clamped(0.5);
    const double h_half = beta_component_density(u, 0.5, 4.0, Side::kLeft);
    CHECK(working_density(u, params, {}) ==
          doctest::Approx(0.5 + 0.5 * h_half).epsilon(1e-12));
    CHECK(assessor_eval(u, params, {}) ==
          doctest::Approx(0.5 / (0.5 + 0.5 * h_half)).epsilon(1e-12));
    CHECK(assessor_eval(u, params, {}) == doctest::Approx(0.8378).epsilon(1e-3));
    // The assessor collapses near the endpoint where the left density blows
    // up.
    CHECK(assessor_eval(UnitInterval::clamped(1e-12), params, {}) < 1e-4);
  }
}

TEST_CASE("u_transform") {
  CHECK(u_transform(0.0).value() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(u_transform(1.5).value() ==
        doctest::Approx(0.9331928).epsilon(1e-6));
  CHECK(u_transform(1.5).value() ==
        doctest::Approx(static_cast<double>(
                            test_oracles::normal_cdf_series(1.5L)))
            .epsilon(1e-12));
  CHECK(u_transform(40.0).value() == 1.0 - kEpsU);
  CHECK(u_transform(-40.0).value() == kEpsU);
  CHECK_THROWS_AS(u_transform(std::nan("")), std::invalid_argument);
}

TEST_CASE("normalization by quadrature over random parameter draws") {
  Rng rng(314159);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t p = rep % 3 == 0 ? 0 : 1;
    const auto params = random_params(rng, p);
    std::vector<double> x;
    if (p == 1) x.push_back(rng.uniform(-1.0, 1.0));
    const HypothesisContext ctx = make_context(params, x);
    const double integral =
        test_oracles::integrate_unit_interval([&](double u, double omu) {
          return std::exp(ctx.log_density(std::log(u), std::log(omu)));
        });
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("reciprocal assessor is convex on a grid") {
  Rng rng(2718);
  for (int rep = 0; rep < 100; ++rep) {
    const auto params = random_params(rng, 0);
    const HypothesisContext ctx = make_context(params, {});
    const int n = 1000;
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) {
      const double u = (i + 0.5) / n;
      b[i] = std::exp(ctx.log_density(std::log(u), std::log1p(-u)) -
                      ctx.log_pi0);
    }
    for (int i = 1; i + 1 < n; ++i) {
      const double second = b[i - 1] + b[i + 1] - 2.0 * b[i];
      const double scale = std::abs(b[i - 1]) + std::abs(b[i + 1]);
      CHECK(second >= -1e-11 * scale);
    }
  }
}

TEST_CASE("mirror symmetry of the working density") {
  Rng rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    const auto params = random_params(rng, 1);
    const auto swapped = swap_sides(params);
    const std::vector<double> x{rng.uniform(-1.0, 1.0)};
    for (int i = 0; i < 20; ++i) {
      const double u = rng.uniform();
      const double a = working_density(UnitInterval::clamped(u), params, x);
      const double b =
          working_density(UnitInterval::clamped(1.0 - u), swapped, x);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("assessor stays within its null-limit bound") {
  Rng rng(555);
  for (int rep = 0; rep < 50; ++rep) {
    const auto params = random_params(rng, 0);
    const HypothesisContext ctx = make_context(params, {});
    // a(u) <= pi0 / min-density; sample the density minimum numerically.
    double min_density = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2000; ++i) {
      const double u = (i + 0.5) / 2000;
      min_density = std::min(
          min_density, std::exp(ctx.log_density(std::log(u), std::log1p(-u))));
    }
    const double bound = std::exp(ctx.log_pi0) / min_density;
    for (int i = 0; i < 200; ++i) {
      const double u = rng.uniform();
      const double a = ctx.assessor(std::log(u), std::log1p(-u));
      CHECK(a > 0.0);
      CHECK(a <= bound * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("params validation") {
  auto params = BetaMixtureParams::intercept_init(2, 0.05, 0.5, 4, 4);
  CHECK_NOTHROW(params.validate());
  params.gamma_l = 2.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params.gamma_l = 4.0;
  params.beta_r.pop_back();
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
}

TEST_CASE("testing input invariants") {
  auto data = TestingInput::from_z({0.0, 1.5, -2.0}, {1.0, 2.0, 3.0}, 1);
  CHECK(data.size() == 3);
  CHECK(data.u[1] == doctest::Approx(normal_cdf(1.5)).epsilon(1e-14));
  CHECK_THROWS_AS(TestingInput::from_z({1.0}, {1.0, 2.0}, 1),
                  std::invalid_argument);
}
