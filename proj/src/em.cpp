#include "zap/em.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace zap {

namespace em_detail {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd augmented_row(const TestingInput& data, std::size_t i) {
  const auto x = data.covariates(i);
  VectorXd v(static_cast<Eigen::Index>(x.size()) + 1);
  v[0] = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) v[static_cast<Eigen::Index>(j) + 1] = x[j];
  return v;
}

void clamp_box(std::vector<double>& coef) {
  for (double& c : coef) c = std::clamp(c, -kCoefBox, kCoefBox);
}

std::vector<double> to_std(const VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Soft-label multinomial logistic log-likelihood in theta = (theta_l, theta_r).
double theta_objective(const TestingInput& data, const std::vector<double>& w_l,
                       const std::vector<double>& w_r,
                       const std::vector<double>& theta_l,
                       const std::vector<double>& theta_r) {
  double f = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto [pl, pr] = link_probabilities(theta_l, theta_r, data.covariates(i));
    const double p0 = std::max(1.0 - pl - pr, 1e-300);
    const double w0 = std::max(1.0 - w_l[i] - w_r[i], 0.0);
    if (w_l[i] > 0.0) f += w_l[i] * std::log(pl);
    if (w_r[i] > 0.0) f += w_r[i] * std::log(pr);
    if (w0 > 0.0) f += w0 * std::log(p0);
  }
  return f;
}

double beta_objective(const TestingInput& data,
                      const std::vector<std::size_t>& rows,
                      const std::vector<double>& weights,
                      const std::vector<double>& targets, double gamma,
                      const std::vector<double>& beta) {
  double f = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (weights[r] == 0.0) continue;
    const double k = link_shape(beta, data.covariates(rows[r]));
    f += (k - 1.0) * targets[r] - weights[r] * log_beta(k, gamma);
  }
  return f;
}

// Ascent step with ridge escalation until the damped negative Hessian is
// positive definite, followed by halving line search.  Returns true when the
// objective strictly improved.
template <typename Objective>
bool newton_ascend(VectorXd& coef, const Objective& objective,
                   const std::function<void(const VectorXd&, VectorXd&,
                                            MatrixXd&)>& derivatives,
                   int max_inner) {
  bool improved = false;
  double f = objective(coef);
  const Eigen::Index d = coef.size();
  VectorXd grad(d);
  MatrixXd hess(d, d);
  for (int it = 0; it < max_inner; ++it) {
    derivatives(coef, grad, hess);
    if (grad.lpNorm<Eigen::Infinity>() < 1e-10 * (1.0 + std::abs(f))) break;
    MatrixXd a = -hess;
    double ridge = 1e-10 * (1.0 + a.diagonal().cwiseAbs().maxCoeff());
    VectorXd dir;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Eigen::LLT<MatrixXd> llt(a + ridge * MatrixXd::Identity(d, d));
      if (llt.info() == Eigen::Success) {
        dir = llt.solve(grad);
        if (dir.allFinite()) break;
      }
      ridge *= 10.0;
      dir.resize(0);
    }
    if (dir.size() == 0) break;
    double tau = 1.0;
    bool stepped = false;
    for (int half = 0; half < 40; ++half) {
      VectorXd cand = coef + tau * dir;
      for (Eigen::Index j = 0; j < d; ++j)
        cand[j] = std::clamp(cand[j], -kCoefBox, kCoefBox);
      const double fc = objective(cand);
      if (std::isfinite(fc) && fc > f) {
        coef = cand;
        const bool converged_step = (fc - f) < 1e-13 * (1.0 + std::abs(f));
        f = fc;
        improved = true;
        stepped = true;
        if (converged_step) return improved;
        break;
      }
      tau *= 0.5;
    }
    if (!stepped) break;
  }
  return improved;
}

}  // namespace

std::vector<double> maximize_theta_block(const TestingInput& data,
                                         const std::vector<double>& w_l,
                                         const std::vector<double>& w_r,
                                         std::vector<double> theta_init,
                                         int max_inner, bool* improved) {
  const std::size_t d = theta_init.size() / 2;
  clamp_box(theta_init);
  VectorXd coef = to_eigen(theta_init);

  auto split = [d](const VectorXd& v) {
    std::vector<double> tl(v.data(), v.data() + d);
    std::vector<double> tr(v.data() + d, v.data() + 2 * d);
    return std::make_pair(tl, tr);
  };

  auto objective = [&](const VectorXd& v) {
    const auto [tl, tr] = split(v);
    return theta_objective(data, w_l, w_r, tl, tr);
  };

  auto derivatives = [&](const VectorXd& v, VectorXd& grad, MatrixXd& hess) {
    const auto [tl, tr] = split(v);
    grad.setZero(static_cast<Eigen::Index>(2 * d));
    hess.setZero(static_cast<Eigen::Index>(2 * d), static_cast<Eigen::Index>(2 * d));
    const Eigen::Index dd = static_cast<Eigen::Index>(d);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const VectorXd xi = augmented_row(data, i);
      const auto [pl, pr] = link_probabilities(tl, tr, data.covariates(i));
      grad.head(dd) += (w_l[i] - pl) * xi;
      grad.tail(dd) += (w_r[i] - pr) * xi;
      const MatrixXd outer = xi * xi.transpose();
      hess.topLeftCorner(dd, dd) -= pl * (1.0 - pl) * outer;
      hess.bottomRightCorner(dd, dd) -= pr * (1.0 - pr) * outer;
      hess.topRightCorner(dd, dd) += pl * pr * outer;
      hess.bottomLeftCorner(dd, dd) += pl * pr * outer;
    }
  };

  const bool did = newton_ascend(coef, objective, derivatives, max_inner);
  if (improved) *improved = did;
  auto out = to_std(coef);
  clamp_box(out);
  return out;
}

std::vector<double> maximize_beta_block(const TestingInput& data,
                                        const std::vector<std::size_t>& rows,
                                        const std::vector<double>& weights,
                                        const std::vector<double>& targets,
                                        double gamma,
                                        std::vector<double> beta_init,
                                        int max_inner, bool* improved) {
  if (improved) *improved = false;
  double total_weight = 0.0;
  for (double w : weights) total_weight += w;
  if (!(total_weight > 0.0)) return beta_init;  // no evidence: leave unchanged

  clamp_box(beta_init);
  VectorXd coef = to_eigen(beta_init);

  auto objective = [&](const VectorXd& v) {
    return beta_objective(data, rows, weights, targets, gamma, to_std(v));
  };

  auto derivatives = [&](const VectorXd& v, VectorXd& grad, MatrixXd& hess) {
    const auto beta = to_std(v);
    grad.setZero(v.size());
    hess.setZero(v.size(), v.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (weights[r] == 0.0 && targets[r] == 0.0) continue;
      const std::size_t i = rows[r];
      const VectorXd xi = augmented_row(data, i);
      const double k = link_shape(beta, data.covariates(i));
      const double s = k * (1.0 - k);
      const double g = targets[r] - weights[r] * (digamma(k) - digamma(k + gamma));
      const double gp = -weights[r] * (trigamma(k) - trigamma(k + gamma));
      grad += g * s * xi;
      hess += (gp * s * s + g * s * (1.0 - 2.0 * k)) * (xi * xi.transpose());
    }
  };

  const bool did = newton_ascend(coef, objective, derivatives, max_inner);
  if (improved) *improved = did;
  auto out = to_std(coef);
  clamp_box(out);
  return out;
}

SufficientStats stats_from_full(const PosteriorWeights& weights,
                                const TestingInput& data) {
  const std::size_t m = data.size();
  if (weights.w_l.size() != m || weights.w_r.size() != m) {
    throw std::invalid_argument("posterior weights inconsistent with data");
  }
  SufficientStats stats;
  stats.w_l = weights.w_l;
  stats.w_r = weights.w_r;
  stats.t_l.resize(m);
  stats.c_l.resize(m);
  stats.t_r.resize(m);
  stats.c_r.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double lu = std::log(data.u[i]);
    const double l1mu = std::log1p(-data.u[i]);
    stats.t_l[i] = weights.w_l[i] * lu;
    stats.c_l[i] = weights.w_l[i] * l1mu;
    stats.t_r[i] = weights.w_r[i] * l1mu;
    stats.c_r[i] = weights.w_r[i] * lu;
  }
  return stats;
}

double q_value(const BetaMixtureParams& params, const SufficientStats& stats,
               const TestingInput& data) {
  double q = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const LocalMixture lm = local_mixture(params, data.covariates(i));
    const double p0 = std::max(1.0 - lm.pi_l - lm.pi_r, 1e-300);
    const double w0 = std::max(1.0 - stats.w_l[i] - stats.w_r[i], 0.0);
    if (stats.w_l[i] > 0.0) q += stats.w_l[i] * std::log(lm.pi_l);
    if (stats.w_r[i] > 0.0) q += stats.w_r[i] * std::log(lm.pi_r);
    if (w0 > 0.0) q += w0 * std::log(p0);
    q += (lm.k_l - 1.0) * stats.t_l[i] + (params.gamma_l - 1.0) * stats.c_l[i] -
         stats.w_l[i] * log_beta(lm.k_l, params.gamma_l);
    q += (lm.k_r - 1.0) * stats.t_r[i] + (params.gamma_r - 1.0) * stats.c_r[i] -
         stats.w_r[i] * log_beta(params.gamma_r, lm.k_r);
  }
  return q;
}

std::vector<double> q_gradient(const BetaMixtureParams& params,
                               const SufficientStats& stats,
                               const TestingInput& data) {
  const std::size_t d = params.dim();
  std::vector<double> grad(4 * d, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.covariates(i);
    const LocalMixture lm = local_mixture(params, x);
    const double gl =
        stats.t_l[i] -
        stats.w_l[i] * (digamma(lm.k_l) - digamma(lm.k_l + params.gamma_l));
    const double gr =
        stats.t_r[i] -
        stats.w_r[i] * (digamma(lm.k_r) - digamma(lm.k_r + params.gamma_r));
    const double sl = lm.k_l * (1.0 - lm.k_l);
    const double sr = lm.k_r * (1.0 - lm.k_r);
    for (std::size_t j = 0; j < d; ++j) {
      const double xj = j == 0 ? 1.0 : x[j - 1];
      grad[j] += (stats.w_l[i] - lm.pi_l) * xj;
      grad[d + j] += (stats.w_r[i] - lm.pi_r) * xj;
      grad[2 * d + j] += gl * sl * xj;
      grad[3 * d + j] += gr * sr * xj;
    }
  }
  return grad;
}

MStepResult m_step_core(const SufficientStats& stats, const TestingInput& data,
                        std::pair<double, double> gammas,
                        const BetaMixtureParams& warm_start, int max_inner) {
  warm_start.validate();
  const std::size_t m = data.size();
  MStepResult res;
  res.params = warm_start;
  res.params.gamma_l = gammas.first;
  res.params.gamma_r = gammas.second;

  std::vector<double> theta(warm_start.theta_l);
  theta.insert(theta.end(), warm_start.theta_r.begin(), warm_start.theta_r.end());
  bool th_improved = false;
  theta = maximize_theta_block(data, stats.w_l, stats.w_r, std::move(theta),
                               max_inner, &th_improved);
  const std::size_t d = warm_start.dim();
  res.params.theta_l.assign(theta.begin(), theta.begin() + d);
  res.params.theta_r.assign(theta.begin() + d, theta.end());

  std::vector<std::size_t> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = i;
  bool bl_improved = false;
  res.params.beta_l =
      maximize_beta_block(data, all, stats.w_l, stats.t_l, gammas.first,
                          warm_start.beta_l, max_inner, &bl_improved);
  bool br_improved = false;
  res.params.beta_r =
      maximize_beta_block(data, all, stats.w_r, stats.t_r, gammas.second,
                          warm_start.beta_r, max_inner, &br_improved);

  res.improved = th_improved || bl_improved || br_improved;
  if (!res.improved) res.params = warm_start;  // keep the warm start verbatim
  return res;
}

double observed_loglik(const BetaMixtureParams& params,
                       const TestingInput& data) {
  double ll = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const HypothesisContext ctx = make_context(params, data.covariates(i));
    const double term =
        ctx.log_density(std::log(data.u[i]), std::log1p(-data.u[i]));
    if (!std::isfinite(term)) {
      throw std::runtime_error("non-finite log-likelihood at hypothesis " +
                               std::to_string(i));
    }
    ll += term;
  }
  return ll;
}

}  // namespace em_detail

PosteriorWeights e_step_full(const BetaMixtureParams& params,
                             const TestingInput& data) {
  params.validate();
  data.validate();
  const std::size_t m = data.size();
  PosteriorWeights w;
  w.w_l.resize(m);
  w.w_r.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const HypothesisContext ctx = make_context(params, data.covariates(i));
    const double lu = std::log(data.u[i]);
    const double l1mu = std::log1p(-data.u[i]);
    const double ld = ctx.log_density(lu, l1mu);
    const double wl = std::isfinite(ctx.log_pi_l)
                          ? std::exp(ctx.log_pi_l + ctx.log_beta_left(lu, l1mu) - ld)
                          : 0.0;
    const double wr = std::isfinite(ctx.log_pi_r)
                          ? std::exp(ctx.log_pi_r + ctx.log_beta_right(lu, l1mu) - ld)
                          : 0.0;
    if (!std::isfinite(wl) || !std::isfinite(wr)) {
      throw std::runtime_error("e_step_full: non-finite weight at hypothesis " +
                               std::to_string(i));
    }
    w.w_l[i] = wl;
    w.w_r[i] = wr;
  }
  return w;
}

MStepResult m_step_full(const PosteriorWeights& weights,
                        const TestingInput& data,
                        std::pair<double, double> gammas,
                        const BetaMixtureParams& warm_start, int max_inner) {
  const auto stats = em_detail::stats_from_full(weights, data);
  return em_detail::m_step_core(stats, data, gammas, warm_start, max_inner);
}

EmFitReport fit_full_em(const TestingInput& data,
                        std::pair<double, double> gammas,
                        const EmConfig& config) {
  data.validate();
  if (data.size() < 10) {
    throw std::invalid_argument("fit_full_em: need at least 10 hypotheses");
  }
  BetaMixtureParams params =
      config.init.value_or(BetaMixtureParams::intercept_init(
          data.p, 0.05, 0.5, gammas.first, gammas.second));
  params.gamma_l = gammas.first;
  params.gamma_r = gammas.second;
  params.validate();

  EmFitReport report;
  double ll = em_detail::observed_loglik(params, data);
  report.loglik_trace.push_back(ll);
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    const PosteriorWeights w = e_step_full(params, data);
    params = m_step_full(w, data, gammas, params, config.max_inner).params;
    const double next = em_detail::observed_loglik(params, data);
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
