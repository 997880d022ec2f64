#include "zap/em_masked.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace zap {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp2(double a, double b) noexcept {
  const double m = std::max(a, b);
  if (m == kNegInf) return kNegInf;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Density-weighted average of (v1, v2) with log weights (la, lb); falls back
// to the plain average when both weights underflow.
double weighted_pair_mean(double la, double lb, double v1, double v2) noexcept {
  const double m = std::max(la, lb);
  if (!std::isfinite(m)) return 0.5 * (v1 + v2);
  const double a = std::exp(la - m);
  const double b = std::exp(lb - m);
  return (a * v1 + b * v2) / (a + b);
}

struct PairLogs {
  double lu1, l1mu1, lu2, l1mu2;
};

PairLogs pair_logs(const MaskedPair& pair) {
  return {std::log(pair.lo), std::log1p(-pair.lo), std::log(pair.hi),
          std::log1p(-pair.hi)};
}

}  // namespace

MaskedSufficientStats e_step_masked(const BetaMixtureParams& params,
                                    const MaskState& state,
                                    const TestingInput& data) {
  params.validate();
  data.validate();
  const std::size_t m = data.size();
  if (state.size() != m) {
    throw std::invalid_argument("e_step_masked: state size mismatch");
  }
  MaskedSufficientStats s;
  s.h_l_hat.resize(m);
  s.h_r_hat.resize(m);
  s.e_logu_l.resize(m);
  s.e_log1mu_l.resize(m);
  s.e_logu_r.resize(m);
  s.e_log1mu_r.resize(m);

  for (std::size_t i = 0; i < m; ++i) {
    const HypothesisContext ctx = make_context(params, data.covariates(i));
    // Singletons are handled by the same two-point formulas with an equal
    // pair; the duplicated log-mass cancels between numerator and
    // denominator, reducing exactly to the full-data E-step.
    const MaskedPair pair =
        state.masked(i) ? state.u_tilde[i]
                        : MaskedPair{data.u[i], data.u[i]};
    const auto [lu1, l1mu1, lu2, l1mu2] = pair_logs(pair);

    const double lhl1 = ctx.log_beta_left(lu1, l1mu1);
    const double lhl2 = ctx.log_beta_left(lu2, l1mu2);
    const double lhr1 = ctx.log_beta_right(lu1, l1mu1);
    const double lhr2 = ctx.log_beta_right(lu2, l1mu2);
    const double lse_d =
        log_sum_exp2(ctx.log_density(lu1, l1mu1), ctx.log_density(lu2, l1mu2));
    if (!std::isfinite(lse_d)) {
      throw std::runtime_error("e_step_masked: non-finite density at hypothesis " +
                               std::to_string(i));
    }

    const double hl =
        std::isfinite(ctx.log_pi_l)
            ? std::exp(ctx.log_pi_l + log_sum_exp2(lhl1, lhl2) - lse_d)
            : 0.0;
    const double hr =
        std::isfinite(ctx.log_pi_r)
            ? std::exp(ctx.log_pi_r + log_sum_exp2(lhr1, lhr2) - lse_d)
            : 0.0;
    const double y_l_logu = weighted_pair_mean(lhl1, lhl2, lu1, lu2);
    const double y_l_log1mu = weighted_pair_mean(lhl1, lhl2, l1mu1, l1mu2);
    const double y_r_logu = weighted_pair_mean(lhr1, lhr2, lu1, lu2);
    const double y_r_log1mu = weighted_pair_mean(lhr1, lhr2, l1mu1, l1mu2);

    s.h_l_hat[i] = hl;
    s.h_r_hat[i] = hr;
    s.e_logu_l[i] = hl * y_l_logu;
    s.e_log1mu_l[i] = hl * y_l_log1mu;
    s.e_logu_r[i] = hr * y_r_logu;
    s.e_log1mu_r[i] = hr * y_r_log1mu;
  }
  return s;
}

namespace em_detail {

double masked_observed_loglik(const BetaMixtureParams& params,
                              const MaskState& state,
                              const TestingInput& data) {
  double ll = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const HypothesisContext ctx = make_context(params, data.covariates(i));
    double term;
    if (state.masked(i)) {
      const auto [lu1, l1mu1, lu2, l1mu2] = pair_logs(state.u_tilde[i]);
      term = log_sum_exp2(ctx.log_density(lu1, l1mu1),
                          ctx.log_density(lu2, l1mu2)) -
             std::log(2.0);
    } else {
      term = ctx.log_density(std::log(data.u[i]), std::log1p(-data.u[i]));
    }
    if (!std::isfinite(term)) {
      throw std::runtime_error(
          "masked_observed_loglik: non-finite term at hypothesis " +
          std::to_string(i));
    }
    ll += term;
  }
  return ll;
}

std::vector<double> fit_logistic(const TestingInput& data,
                                 const std::vector<std::size_t>& rows,
                                 const std::vector<double>& y, double ridge) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const std::size_t d = data.p + 1;

  auto intercept_only = [&]() {
    double mean = 0.5;
    if (!rows.empty()) {
      double s = 0.0;
      for (double v : y) s += v;
      mean = std::clamp(s / static_cast<double>(rows.size()), 0.01, 0.99);
    }
    std::vector<double> coef(d, 0.0);
    coef[0] = std::log(mean / (1.0 - mean));
    return coef;
  };

  if (rows.size() < 2 * d) return intercept_only();

  VectorXd coef = VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (int it = 0; it < 50; ++it) {
    VectorXd grad = -ridge * coef;
    MatrixXd hess = ridge * MatrixXd::Identity(coef.size(), coef.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto x = data.covariates(rows[r]);
      VectorXd xi(coef.size());
      xi[0] = 1.0;
      for (std::size_t j = 0; j < x.size(); ++j) xi[static_cast<Eigen::Index>(j) + 1] = x[j];
      double eta = std::clamp(xi.dot(coef), -kMaxLinearPredictor,
                              kMaxLinearPredictor);
      const double p = 1.0 / (1.0 + std::exp(-eta));
      grad += (y[r] - p) * xi;
      hess += p * (1.0 - p) * xi * xi.transpose();
    }
    const Eigen::LLT<MatrixXd> llt(hess);
    if (llt.info() != Eigen::Success) return intercept_only();
    const VectorXd step = llt.solve(grad);
    coef += step;
    if (!coef.allFinite() || coef.lpNorm<Eigen::Infinity>() > 30.0) {
      return intercept_only();  // separation
    }
    if (step.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  return std::vector<double>(coef.data(), coef.data() + coef.size());
}

double logistic_predict(const std::vector<double>& coef,
                        std::span<const double> x) {
  double eta = coef[0];
  for (std::size_t j = 0; j < x.size(); ++j) eta += coef[j + 1] * x[j];
  eta = std::clamp(eta, -kMaxLinearPredictor, kMaxLinearPredictor);
  return 1.0 / (1.0 + std::exp(-eta));
}

}  // namespace em_detail

MaskedInitState initialize_masked(const MaskState& state,
                                  const TestingInput& data,
                                  std::pair<double, double> gammas) {
  const std::size_t m = data.size();
  MaskedInitState init;

  // Side groups and the per-side extreme pair elements.  For an unmasked i
  // the pair is the singleton and its reflection, matching the masked case.
  std::vector<std::size_t> left_rows, right_rows;
  std::vector<double> left_values, right_values;
  std::vector<double> side(m);  // D_i = I(u-side is right)
  for (std::size_t i = 0; i < m; ++i) {
    const MaskedPair& pr = state.u_tilde[i];
    if (pr.hi <= 0.5) {
      side[i] = 0.0;
      left_rows.push_back(i);
      left_values.push_back(std::min(pr.lo, reflect(pr.lo)));
    } else {
      side[i] = 1.0;
      right_rows.push_back(i);
      right_values.push_back(std::max(pr.hi, reflect(pr.hi)));
    }
  }

  const std::size_t d = data.p + 1;
  std::vector<double> beta_l(d, 0.0), beta_r(d, 0.0);
  if (!left_rows.empty()) {
    std::vector<double> weights(left_rows.size(), 1.0);
    std::vector<double> targets(left_rows.size());
    for (std::size_t r = 0; r < left_rows.size(); ++r)
      targets[r] = std::log(left_values[r]);
    beta_l = em_detail::maximize_beta_block(data, left_rows, weights, targets,
                                            gammas.first, beta_l, 25);
  }
  if (!right_rows.empty()) {
    std::vector<double> weights(right_rows.size(), 1.0);
    std::vector<double> targets(right_rows.size());
    for (std::size_t r = 0; r < right_rows.size(); ++r)
      targets[r] = std::log1p(-right_values[r]);
    beta_r = em_detail::maximize_beta_block(data, right_rows, weights, targets,
                                            gammas.second, beta_r, 25);
  }

  std::vector<std::size_t> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = i;
  init.d_model = em_detail::fit_logistic(data, all, side);

  // Unmasked indicators per side.
  std::vector<double> j_left(left_rows.size()), j_right(right_rows.size());
  for (std::size_t r = 0; r < left_rows.size(); ++r)
    j_left[r] = state.masked(left_rows[r]) ? 0.0 : 1.0;
  for (std::size_t r = 0; r < right_rows.size(); ++r)
    j_right[r] = state.masked(right_rows[r]) ? 0.0 : 1.0;
  init.j_model_left = em_detail::fit_logistic(data, left_rows, j_left);
  init.j_model_right = em_detail::fit_logistic(data, right_rows, j_right);

  init.pi_l0.resize(m);
  init.pi_r0.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto x = data.covariates(i);
    const double p_right = em_detail::logistic_predict(init.d_model, x);
    const double p_left = 1.0 - p_right;
    const double pj_right = em_detail::logistic_predict(init.j_model_right, x);
    const double pj_left = em_detail::logistic_predict(init.j_model_left, x);

    // Conservative bound for P(H_r = 1 | right side): the share of the
    // unmasked sliver explains the observed singleton rate under the null;
    // when the sliver nearly vanishes, the correction's limit applies.
    const double width_r = 0.5 - 2.0 * (1.0 - state.thresholds.s_r[i]);
    double pi_r_plus;
    if (width_r <= 0.02) {
      pi_r_plus = 1.0 - pj_right;
    } else {
      pi_r_plus = (1.0 - pj_right) + pj_right * (1.0 - 0.5 / width_r);
    }
    const double width_l = 0.5 - 2.0 * state.thresholds.s_l[i];
    double pi_l_minus;
    if (width_l <= 0.02) {
      pi_l_minus = 1.0 - pj_left;
    } else {
      pi_l_minus = (1.0 - pj_left) + pj_left * (1.0 - 0.5 / width_l);
    }
    pi_r_plus = std::clamp(pi_r_plus, 0.01, 0.99);
    pi_l_minus = std::clamp(pi_l_minus, 0.01, 0.99);
    double pi_r = std::clamp(pi_r_plus * p_right, 0.01, 0.99);
    double pi_l = std::clamp(pi_l_minus * p_left, 0.01, 0.99);
    if (pi_l + pi_r > 0.98) {  // keep a nonzero null weight
      const double scale = 0.98 / (pi_l + pi_r);
      pi_l *= scale;
      pi_r *= scale;
    }
    init.pi_l0[i] = pi_l;
    init.pi_r0[i] = pi_r;
  }

  // Project the per-hypothesis probabilities onto the multinomial link so EM
  // can start from model parameters.
  std::vector<double> theta(2 * d, 0.0);
  theta = em_detail::maximize_theta_block(data, init.pi_l0, init.pi_r0,
                                          std::move(theta), 25);
  init.params0.theta_l.assign(theta.begin(), theta.begin() + d);
  init.params0.theta_r.assign(theta.begin() + d, theta.end());
  init.params0.beta_l = std::move(beta_l);
  init.params0.beta_r = std::move(beta_r);
  init.params0.gamma_l = gammas.first;
  init.params0.gamma_r = gammas.second;
  init.params0.validate();
  return init;
}

EmFitReport fit_masked_em(const MaskState& state, const TestingInput& data,
                          std::pair<double, double> gammas,
                          const EmConfig& config) {
  data.validate();
  if (data.size() < 10) {
    throw std::invalid_argument("fit_masked_em: need at least 10 hypotheses");
  }
  BetaMixtureParams params =
      config.init ? *config.init
                  : initialize_masked(state, data, gammas).params0;
  params.gamma_l = gammas.first;
  params.gamma_r = gammas.second;
  params.validate();

  EmFitReport report;
  double ll = em_detail::masked_observed_loglik(params, state, data);
  report.loglik_trace.push_back(ll);
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    const MaskedSufficientStats ms = e_step_masked(params, state, data);
    em_detail::SufficientStats stats;
    stats.w_l = ms.h_l_hat;
    stats.w_r = ms.h_r_hat;
    stats.t_l = ms.e_logu_l;
    stats.c_l = ms.e_log1mu_l;
    stats.t_r = ms.e_log1mu_r;
    stats.c_r = ms.e_logu_r;
    params = em_detail::m_step_core(stats, data, gammas, params,
                                    config.max_inner)
                 .params;
    const double next = em_detail::masked_observed_loglik(params, state, data);
    report.loglik_trace.push_back(next);
    report.iterations = iter;
    if (std::abs(next - ll) < config.tol * (1.0 + std::abs(ll))) {
      report.converged = true;
      ll = next;
      break;
    }
    ll = next;
  }
  report.params = std::move(params);
  return report;
}

}  // namespace zap
