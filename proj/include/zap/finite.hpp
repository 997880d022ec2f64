#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "zap/em.hpp"
#include "zap/em_masked.hpp"
#include "zap/masking.hpp"
#include "zap/model.hpp"
#include "zap/result.hpp"

namespace zap {

struct FiniteRunConfig {
  double alpha = 0.05;
  double s_l0 = 0.2;
  double s_r0 = 0.8;
  std::size_t refit_every = 0;  // 0 -> ceil(m / 100)
  std::pair<double, double> gammas{4.0, 4.0};
  EmConfig em;
  std::uint64_t seed = 1;  // recorded for reproducibility; the loop itself
                           // is deterministic

  void validate(std::size_t m) const;
  std::size_t effective_refit_every(std::size_t m) const;
};

struct RevealRecord {
  int step = 0;
  std::size_t index = 0;
  double fdp = 0.0;          // estimate that triggered the reveal
  std::size_t n_reject = 0;  // |R_t| at decision time
  std::size_t n_accept = 0;  // |A_t| at decision time
};

using RevealTrace = std::vector<RevealRecord>;

// Assessor scores of the masked hypotheses at the pair element nearer the
// extreme of (0,1); computable from the masked pair alone.  Returns
// (hypothesis index, score) with indices ascending.  Throws when the masked
// set is empty.
std::vector<std::pair<std::size_t, double>> score_masked(
    const BetaMixtureParams& params, const MaskState& state,
    const TestingInput& data);

// Reveals the argmax score (ties resolved toward the smallest index): the
// matching threshold moves to the pair's outer element and the hypothesis is
// flagged revealed, which keeps the thresholds monotone over algorithm time.
MaskState reveal_least_significant(
    const MaskState& state,
    const std::vector<std::pair<std::size_t, double>>& scores,
    const TestingInput& data);

struct FiniteRunResult {
  RejectionResult rejection;
  RevealTrace trace;
  BetaMixtureParams last_params;  // model at termination (diagnostics)
};

FiniteRunResult run_zap_finite(const TestingInput& data,
                               const FiniteRunConfig& config);

// Runs the reveal loop once and records the rejection set for every level in
// `alphas` (the reveal order does not depend on alpha, only the stopping
// time does).  Results are returned in the order of `alphas`.
std::vector<FiniteRunResult> run_zap_finite_multi(
    const TestingInput& data, const FiniteRunConfig& config,
    const std::vector<double>& alphas);

}  // namespace zap
