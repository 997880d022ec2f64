#pragma once

#include <utility>
#include <vector>

#include "zap/em.hpp"
#include "zap/masking.hpp"
#include "zap/model.hpp"

namespace zap {

// Expected sufficient statistics computed from the masked view.  For masked
// hypotheses the expectations run over the two candidate values of the pair;
// for unmasked ones they collapse to the full-data E-step quantities times
// log u / log(1-u).
struct MaskedSufficientStats {
  std::vector<double> h_l_hat, h_r_hat;
  std::vector<double> e_logu_l, e_log1mu_l;  // E[H_l log U], E[H_l log(1-U)]
  std::vector<double> e_logu_r, e_log1mu_r;
};

MaskedSufficientStats e_step_masked(const BetaMixtureParams& params,
                                    const MaskState& state,
                                    const TestingInput& data);

struct MaskedInitState {
  BetaMixtureParams params0;
  // Auxiliary fits behind the initial probabilities, kept for diagnostics:
  // the logistic model for the side indicator I(u > 0.5) and the per-side
  // logistic models for the unmasked indicator.
  std::vector<double> d_model;
  std::vector<double> j_model_left;
  std::vector<double> j_model_right;
  std::vector<double> pi_l0, pi_r0;  // per-hypothesis, clamped to [0.01, 0.99]
};

// The masked-data initialization heuristics: per-side beta fits on the
// extreme pair elements plus conservative product bounds for the initial
// component probabilities.
MaskedInitState initialize_masked(const MaskState& state,
                                  const TestingInput& data,
                                  std::pair<double, double> gammas);

// EM fit of the working model from the partially masked data.  The observed
// likelihood being ascended treats each masked pair as a two-point set.
EmFitReport fit_masked_em(const MaskState& state, const TestingInput& data,
                          std::pair<double, double> gammas,
                          const EmConfig& config);

namespace em_detail {

// sum over unmasked of log h(u) plus sum over masked of
// log[(h(u) + h(reflection))/2]; throws naming the first non-finite term.
double masked_observed_loglik(const BetaMixtureParams& params,
                              const MaskState& state, const TestingInput& data);

// Ridge-stabilized logistic regression of y on the covariates of the listed
// rows; returns intercept-augmented coefficients.  Falls back to an
// intercept-only fit on separation or non-convergence.
std::vector<double> fit_logistic(const TestingInput& data,
                                 const std::vector<std::size_t>& rows,
                                 const std::vector<double>& y,
                                 double ridge = 1e-6);

double logistic_predict(const std::vector<double>& coef,
                        std::span<const double> x);

}  // namespace em_detail

}  // namespace zap
