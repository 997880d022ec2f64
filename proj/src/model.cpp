#include "zap/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace zap {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double dot_augmented(const std::vector<double>& coef,
                     std::span<const double> x) {
  if (coef.size() != x.size() + 1) {
    throw std::invalid_argument(
        "coefficient vector and covariate dimension mismatch");
  }
  double eta = coef[0];
  for (std::size_t j = 0; j < x.size(); ++j) eta += coef[j + 1] * x[j];
  return std::clamp(eta, -kMaxLinearPredictor, kMaxLinearPredictor);
}

// log(e^a + e^b + e^c) tolerating -inf entries.
double log_sum_exp3(double a, double b, double c) noexcept {
  const double m = std::max(a, std::max(b, c));
  if (m == kNegInf) return kNegInf;
  return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

}  // namespace

UnitInterval UnitInterval::clamped(double u) {
  if (std::isnan(u)) {
    throw std::invalid_argument("UnitInterval: NaN value");
  }
  return UnitInterval(clamp_unit(u));
}

void BetaMixtureParams::validate() const {
  const std::size_t d = theta_l.size();
  if (d == 0 || theta_r.size() != d || beta_l.size() != d ||
      beta_r.size() != d) {
    throw std::invalid_argument(
        "BetaMixtureParams: coefficient vectors must share one length >= 1");
  }
  if (!(gamma_l > 2.0) || !(gamma_r > 2.0)) {
    throw std::invalid_argument("BetaMixtureParams: fixed shapes must be > 2");
  }
}

BetaMixtureParams BetaMixtureParams::intercept_init(std::size_t p, double pi0,
                                                    double k0, double gamma_l,
                                                    double gamma_r) {
  if (!(pi0 > 0.0 && pi0 < 0.5)) {
    throw std::invalid_argument("intercept_init: pi0 must be in (0, 0.5)");
  }
  if (!(k0 > 0.0 && k0 < 1.0)) {
    throw std::invalid_argument("intercept_init: k0 must be in (0, 1)");
  }
  BetaMixtureParams params;
  params.theta_l.assign(p + 1, 0.0);
  params.theta_r.assign(p + 1, 0.0);
  params.beta_l.assign(p + 1, 0.0);
  params.beta_r.assign(p + 1, 0.0);
  // e^t / (1 + 2 e^t) = pi0  =>  t = log(pi0 / (1 - 2 pi0)).
  params.theta_l[0] = params.theta_r[0] = std::log(pi0 / (1.0 - 2.0 * pi0));
  params.beta_l[0] = params.beta_r[0] = std::log(k0 / (1.0 - k0));
  params.gamma_l = gamma_l;
  params.gamma_r = gamma_r;
  params.validate();
  return params;
}

TestingInput TestingInput::from_z(std::vector<double> z_values,
                                  std::vector<double> covariates,
                                  std::size_t p) {
  TestingInput data;
  data.u.reserve(z_values.size());
  for (double zi : z_values) data.u.push_back(u_transform(zi).value());
  data.z = std::move(z_values);
  data.x = std::move(covariates);
  data.p = p;
  data.validate();
  return data;
}

TestingInput TestingInput::from_u(std::vector<double> u_values,
                                  std::vector<double> covariates,
                                  std::size_t p) {
  TestingInput data;
  data.u.reserve(u_values.size());
  for (double ui : u_values) data.u.push_back(UnitInterval::clamped(ui).value());
  data.x = std::move(covariates);
  data.p = p;
  data.validate();
  return data;
}

void TestingInput::validate() const {
  if (u.empty()) throw std::invalid_argument("TestingInput: no hypotheses");
  if (x.size() != u.size() * p) {
    throw std::invalid_argument("TestingInput: covariate matrix shape");
  }
  if (!z.empty() && z.size() != u.size()) {
    throw std::invalid_argument("TestingInput: z-value count mismatch");
  }
}

std::pair<double, double> link_probabilities(
    const std::vector<double>& theta_l, const std::vector<double>& theta_r,
    std::span<const double> x) {
  const double eta_l = dot_augmented(theta_l, x);
  const double eta_r = dot_augmented(theta_r, x);
  const double m = std::max(0.0, std::max(eta_l, eta_r));
  const double denom =
      std::exp(-m) + std::exp(eta_l - m) + std::exp(eta_r - m);
  return {std::exp(eta_l - m) / denom, std::exp(eta_r - m) / denom};
}

double link_shape(const std::vector<double>& beta, std::span<const double> x) {
  const double eta = dot_augmented(beta, x);
  const double k = 1.0 / (1.0 + std::exp(-eta));
  // The predictor box keeps eta finite, so k is strictly inside (0,1) up to
  // double rounding; nudge away from the closed endpoints.
  return std::min(std::max(k, 1e-300), 1.0 - 1e-16);
}

LocalMixture local_mixture(const BetaMixtureParams& params,
                           std::span<const double> x) {
  LocalMixture lm;
  std::tie(lm.pi_l, lm.pi_r) =
      link_probabilities(params.theta_l, params.theta_r, x);
  lm.k_l = link_shape(params.beta_l, x);
  lm.k_r = link_shape(params.beta_r, x);
  return lm;
}

double beta_component_density(UnitInterval u, double k, double gamma,
                              Side side) {
  if (!(k > 0.0 && k < 1.0)) {
    throw std::domain_error("beta_component_density: k must be in (0,1)");
  }
  if (!(gamma > 2.0)) {
    throw std::domain_error("beta_component_density: gamma must be > 2");
  }
  const double lu = std::log(u.value());
  const double l1mu = std::log1p(-u.value());
  if (side == Side::kLeft) {
    return std::exp((k - 1.0) * lu + (gamma - 1.0) * l1mu - log_beta(k, gamma));
  }
  return std::exp((gamma - 1.0) * lu + (k - 1.0) * l1mu - log_beta(gamma, k));
}

double HypothesisContext::log_density(double lu, double l1mu) const noexcept {
  const double tl =
      log_pi_l == kNegInf ? kNegInf : log_pi_l + log_beta_left(lu, l1mu);
  const double tr =
      log_pi_r == kNegInf ? kNegInf : log_pi_r + log_beta_right(lu, l1mu);
  return log_sum_exp3(log_pi0, tl, tr);
}

HypothesisContext make_context(const BetaMixtureParams& params,
                               std::span<const double> x) {
  const LocalMixture lm = local_mixture(params, x);
  const double pi0 = 1.0 - lm.pi_l - lm.pi_r;
  if (!(pi0 > 0.0)) {
    throw std::domain_error("working model: degenerate null weight");
  }
  HypothesisContext ctx;
  ctx.log_pi0 = std::log(pi0);
  ctx.log_pi_l = lm.pi_l > 0.0 ? std::log(lm.pi_l) : kNegInf;
  ctx.log_pi_r = lm.pi_r > 0.0 ? std::log(lm.pi_r) : kNegInf;
  ctx.k_l = lm.k_l;
  ctx.k_r = lm.k_r;
  ctx.gamma_l = params.gamma_l;
  ctx.gamma_r = params.gamma_r;
  ctx.lbeta_l = log_beta(lm.k_l, params.gamma_l);
  ctx.lbeta_r = log_beta(params.gamma_r, lm.k_r);
  return ctx;
}

double working_density(UnitInterval u, const BetaMixtureParams& params,
                       std::span<const double> x) {
  const HypothesisContext ctx = make_context(params, x);
  return std::exp(
      ctx.log_density(std::log(u.value()), std::log1p(-u.value())));
}

double assessor_eval(UnitInterval u, const BetaMixtureParams& params,
                     std::span<const double> x) {
  const HypothesisContext ctx = make_context(params, x);
  return ctx.assessor(std::log(u.value()), std::log1p(-u.value()));
}

UnitInterval u_transform(double z) {
  if (std::isnan(z)) {
    throw std::invalid_argument("u_transform: NaN z-value");
  }
  return UnitInterval::clamped(normal_cdf(z));
}

}  // namespace zap
