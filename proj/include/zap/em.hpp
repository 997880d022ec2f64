#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "zap/model.hpp"

namespace zap {

// Coefficients live in this box, a compact proxy that keeps soft-label fits
// from diverging when the labels are separable.
inline constexpr double kCoefBox = 20.0;

struct EmConfig {
  double tol = 1e-8;
  int max_iter = 200;
  int max_inner = 25;  // Newton iterations per M-step block
  std::optional<BetaMixtureParams> init;
};

// Posterior membership probabilities of the two non-null components.
struct PosteriorWeights {
  std::vector<double> w_l;
  std::vector<double> w_r;
};

struct EmFitReport {
  BetaMixtureParams params;
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
};

struct MStepResult {
  BetaMixtureParams params;
  bool improved = false;
};

PosteriorWeights e_step_full(const BetaMixtureParams& params,
                             const TestingInput& data);

MStepResult m_step_full(const PosteriorWeights& weights,
                        const TestingInput& data,
                        std::pair<double, double> gammas,
                        const BetaMixtureParams& warm_start,
                        int max_inner = 25);

// Maximum-likelihood fit of the working model on fully observed data.
EmFitReport fit_full_em(const TestingInput& data,
                        std::pair<double, double> gammas,
                        const EmConfig& config);

namespace em_detail {

// Expected complete-data sufficient statistics.  For fully observed data the
// shape-linked targets are t_l = w_l log u and t_r = w_r log(1-u); the masked
// E-step supplies the pair-averaged analogues.
struct SufficientStats {
  std::vector<double> w_l, w_r;  // soft labels
  std::vector<double> t_l;       // E[H_l log U]
  std::vector<double> c_l;       // E[H_l log(1-U)]
  std::vector<double> t_r;       // E[H_r log(1-U)]
  std::vector<double> c_r;       // E[H_r log U]
};

SufficientStats stats_from_full(const PosteriorWeights& weights,
                                const TestingInput& data);

// The EM minorant Q evaluated at `params` for fixed sufficient statistics,
// and its gradient stacked as [theta_l, theta_r, beta_l, beta_r].
double q_value(const BetaMixtureParams& params, const SufficientStats& stats,
               const TestingInput& data);
std::vector<double> q_gradient(const BetaMixtureParams& params,
                               const SufficientStats& stats,
                               const TestingInput& data);

MStepResult m_step_core(const SufficientStats& stats, const TestingInput& data,
                        std::pair<double, double> gammas,
                        const BetaMixtureParams& warm_start, int max_inner);

// Blockwise damped-Newton ascent used by the M-step and by the masked-data
// initializer.  Both return the (possibly unchanged) coefficients.
std::vector<double> maximize_theta_block(
    const TestingInput& data, const std::vector<double>& w_l,
    const std::vector<double>& w_r, std::vector<double> theta_init,
    int max_inner, bool* improved = nullptr);

// Maximizes sum_i [(k_i - 1) t_i - w_i log B(k_i, gamma)] over the shape
// coefficients, where k_i is the logistic link at the i-th row of `rows`.
std::vector<double> maximize_beta_block(
    const TestingInput& data, const std::vector<std::size_t>& rows,
    const std::vector<double>& weights, const std::vector<double>& targets,
    double gamma, std::vector<double> beta_init, int max_inner,
    bool* improved = nullptr);

// Observed-data log-likelihood sum_i log h_{x_i}(u_i); throws a
// std::runtime_error naming the first offending hypothesis if a term is not
// finite.
double observed_loglik(const BetaMixtureParams& params,
                       const TestingInput& data);

}  // namespace em_detail

}  // namespace zap
