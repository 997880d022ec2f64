#include "zap/finite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace zap {

void FiniteRunConfig::validate(std::size_t m) const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("FiniteRunConfig: alpha must be in (0,1)");
  }
  if (!(s_l0 > 0.0 && s_l0 <= 0.25)) {
    throw std::invalid_argument("FiniteRunConfig: s_l0 must be in (0, 0.25]");
  }
  if (!(s_r0 >= 0.75 && s_r0 < 1.0)) {
    throw std::invalid_argument("FiniteRunConfig: s_r0 must be in [0.75, 1)");
  }
  if (m < 10) {
    throw std::invalid_argument("run_zap_finite: need at least 10 hypotheses");
  }
}

std::size_t FiniteRunConfig::effective_refit_every(std::size_t m) const {
  if (refit_every >= 1) return refit_every;
  return (m + 99) / 100;  // ceil(m / 100)
}

std::vector<std::pair<std::size_t, double>> score_masked(
    const BetaMixtureParams& params, const MaskState& state,
    const TestingInput& data) {
  if (state.masked_count() == 0) {
    throw std::invalid_argument("score_masked: empty masked set");
  }
  std::vector<std::pair<std::size_t, double>> scores;
  scores.reserve(state.masked_count());
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!state.masked(i)) continue;
    const MaskedPair& pair = state.u_tilde[i];
    // The pair element nearer the extreme of (0,1); both elements lie on one
    // side of 1/2, so this is computable from the pair alone.
    const double u_prime = pair.hi <= 0.5 ? pair.lo : pair.hi;
    const double t = assessor_eval(UnitInterval::clamped(u_prime), params,
                                   data.covariates(i));
    scores.emplace_back(i, t);
  }
  return scores;
}

MaskState reveal_least_significant(
    const MaskState& state,
    const std::vector<std::pair<std::size_t, double>>& scores,
    const TestingInput& data) {
  if (scores.empty()) {
    throw std::invalid_argument("reveal_least_significant: no scores");
  }
  // Argmax with ties resolved toward the smallest hypothesis index; the
  // scores arrive in ascending index order.
  std::size_t j = scores.front().first;
  double best = scores.front().second;
  for (const auto& [idx, sc] : scores) {
    if (sc > best) {
      best = sc;
      j = idx;
    }
  }

  MaskState next = state;
  const MaskedPair pair = state.u_tilde[j];
  if (pair.hi > 0.5) {
    next.thresholds.s_r[j] = pair.hi;
  } else {
    next.thresholds.s_l[j] = pair.lo;
  }
  if (is_reject(state.region[j])) {
    --next.reject_count;
  } else {
    --next.accept_count;
  }
  next.region[j] = Region::kUnmasked;
  next.revealed[j] = 1;
  next.u_tilde[j] = {data.u[j], data.u[j]};
  return next;
}

namespace {

RejectionResult make_finite_result(const MaskState& state, double fdp,
                                   const BetaMixtureParams* params,
                                   const TestingInput& data, bool rejected) {
  RejectionResult res;
  if (rejected) {
    for (std::size_t i = 0; i < state.size(); ++i) {
      if (is_reject(state.region[i])) res.rejected.push_back(i);
    }
    res.fdp_estimate = fdp;
    res.threshold = std::numeric_limits<double>::infinity();
  }
  if (params != nullptr) {
    res.stats.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      res.stats[i] = assessor_eval(UnitInterval::clamped(data.u[i]), *params,
                                   data.covariates(i));
    }
  }
  return res;
}

}  // namespace

std::vector<FiniteRunResult> run_zap_finite_multi(
    const TestingInput& data, const FiniteRunConfig& config,
    const std::vector<double>& alphas) {
  data.validate();
  config.validate(data.size());
  if (alphas.empty()) {
    throw std::invalid_argument("run_zap_finite: no alpha levels");
  }
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) {
      throw std::invalid_argument("run_zap_finite: alpha must be in (0,1)");
    }
  }
  const std::size_t m = data.size();
  const std::size_t refit_cadence = config.effective_refit_every(m);

  ThresholdFunctions thresholds;
  thresholds.s_l.assign(m, config.s_l0);
  thresholds.s_r.assign(m, config.s_r0);
  MaskState state = masked_view(data, std::move(thresholds));

  std::vector<FiniteRunResult> results(alphas.size());
  std::vector<char> done(alphas.size(), 0);
  std::size_t remaining = alphas.size();

  RevealTrace trace;
  bool have_params = false;
  BetaMixtureParams params;
  std::size_t reveals_since_fit = 0;

  for (int t = 0;; ++t) {
    state.step = t;
    const double fdp = fdp_finite(state);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      if (!done[a] && fdp <= alphas[a]) {
        results[a].rejection = make_finite_result(
            state, fdp, have_params ? &params : nullptr, data, true);
        results[a].trace = trace;
        if (have_params) results[a].last_params = params;
        done[a] = 1;
        --remaining;
      }
    }
    if (remaining == 0) break;
    if (state.masked_count() == 0) {
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        if (done[a]) continue;
        results[a].rejection = make_finite_result(
            state, fdp, have_params ? &params : nullptr, data, false);
        results[a].trace = trace;
        if (have_params) results[a].last_params = params;
      }
      break;
    }

    if (!have_params || reveals_since_fit >= refit_cadence) {
      EmConfig em = config.em;
      if (have_params && !em.init) em.init = params;  // warm-start refits
      try {
        params = fit_masked_em(state, data, config.gammas, em).params;
        have_params = true;
      } catch (const std::exception&) {
        // A failed refit falls back to the previous parameters, which remain
        // a function of the masked data.
        if (!have_params) throw;
      }
      reveals_since_fit = 0;
    }

    const auto scores = score_masked(params, state, data);
    std::size_t j = scores.front().first;
    double best = scores.front().second;
    for (const auto& [idx, sc] : scores) {
      if (sc > best) {
        best = sc;
        j = idx;
      }
    }
    trace.push_back({t, j, fdp, state.reject_count, state.accept_count});
    state = reveal_least_significant(state, scores, data);
    ++reveals_since_fit;
  }
  return results;
}

FiniteRunResult run_zap_finite(const TestingInput& data,
                               const FiniteRunConfig& config) {
  auto results = run_zap_finite_multi(data, config, {config.alpha});
  return std::move(results.front());
}

}  // namespace zap
