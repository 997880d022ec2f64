#include "zap/asymp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "zap/parallel.hpp"
#include "zap/rng.hpp"

namespace zap {

namespace {

constexpr std::uint64_t kNullPoolStream = 0x6e756c6c;  // pool of shared draws

struct UniformPool {
  std::vector<double> lu;
  std::vector<double> l1mu;

  explicit UniformPool(const std::vector<double>& u) {
    lu.resize(u.size());
    l1mu.resize(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
      lu[j] = std::log(u[j]);
      l1mu[j] = std::log1p(-u[j]);
    }
  }
};

std::vector<double> evaluate_null_sorted(const HypothesisContext& ctx,
                                         const UniformPool& pool) {
  std::vector<double> values(pool.lu.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    values[j] = ctx.assessor(pool.lu[j], pool.l1mu[j]);
  }
  std::sort(values.begin(), values.end());
  return values;
}

// Largest sample value whose weak-inequality ECDF stays at or below 1/2;
// -inf when even the smallest value exceeds the bound (all values tied).
double half_cdf_cutpoint(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  if (n < 2) return sorted.empty() ? -std::numeric_limits<double>::infinity()
                                   : sorted.front();
  std::size_t j = n / 2;  // first index whose ECDF can exceed 1/2
  // Walk below any tie block straddling the midpoint.
  while (j > 0 && sorted[j - 1] == sorted[j]) --j;
  if (j == 0) return -std::numeric_limits<double>::infinity();
  return sorted[j - 1];
}

}  // namespace

EmpiricalSample null_reference(const BetaMixtureParams& params,
                               std::span<const double> x,
                               const std::vector<double>& shared_uniforms) {
  if (shared_uniforms.empty()) {
    throw std::invalid_argument("null_reference: empty uniform pool");
  }
  const UniformPool pool(shared_uniforms);
  const HypothesisContext ctx = make_context(params, x);
  return EmpiricalSample::from_sorted(evaluate_null_sorted(ctx, pool));
}

double mirror_statistic(double t_i, const EmpiricalSample& null_sample) {
  const double s = null_sample.ecdf_leq(t_i);
  return null_sample.quantile(1.0 - s);
}

RejectionResult select_threshold_asymp(const std::vector<double>& t_hat,
                                       const std::vector<double>& t_mirror,
                                       double alpha, double t_max) {
  const std::size_t m = t_hat.size();
  if (t_mirror.size() != m) {
    throw std::invalid_argument("select_threshold_asymp: length mismatch");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("select_threshold_asymp: alpha must be in (0,1)");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (std::isnan(t_hat[i]) || std::isnan(t_mirror[i])) {
      throw std::invalid_argument("select_threshold_asymp: NaN statistic");
    }
  }

  std::vector<double> sorted_t(t_hat);
  std::sort(sorted_t.begin(), sorted_t.end());
  std::vector<double> sorted_m(t_mirror);
  std::sort(sorted_m.begin(), sorted_m.end());

  // Scan candidates T_(1) <= ... <= T_(m); within a tie block the largest
  // rank wins automatically, so tied statistics are jointly rejected or not.
  std::size_t best_l = 0;
  double best_estimate = std::numeric_limits<double>::infinity();
  std::size_t mirrors_below = 0;
  for (std::size_t l = 1; l <= m; ++l) {
    const double threshold = sorted_t[l - 1];
    if (threshold > t_max) break;
    while (mirrors_below < m && sorted_m[mirrors_below] <= threshold) {
      ++mirrors_below;
    }
    const double estimate = (1.0 + static_cast<double>(mirrors_below)) /
                            static_cast<double>(l);
    if (estimate <= alpha) {
      best_l = l;
      best_estimate = estimate;
    }
  }

  RejectionResult res;
  res.stats = t_hat;
  if (best_l == 0) return res;  // +inf sentinel, empty set
  res.threshold = sorted_t[best_l - 1];
  res.fdp_estimate = best_estimate;
  for (std::size_t i = 0; i < m; ++i) {
    if (t_hat[i] <= res.threshold) res.rejected.push_back(i);
  }
  return res;
}

AssessorStatistics compute_assessor_statistics(const BetaMixtureParams& params,
                                               const TestingInput& data,
                                               std::uint64_t seed,
                                               std::size_t n_monte_carlo,
                                               int threads) {
  params.validate();
  data.validate();
  const std::size_t m = data.size();

  Rng rng(derive_seed(seed, kNullPoolStream));
  const std::vector<double> uniforms = rng.uniforms(n_monte_carlo);
  const UniformPool pool(uniforms);

  AssessorStatistics stats;
  stats.t_hat.resize(m);
  stats.t_mirror.resize(m);
  stats.s_hat.resize(m);
  stats.null_samples_seed = seed;
  stats.n_monte_carlo = n_monte_carlo;

  // Hypotheses sharing a covariate row share the simulated null, so group by
  // row before evaluating the pool.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto xa = data.covariates(a);
    const auto xb = data.covariates(b);
    return std::lexicographical_compare(xa.begin(), xa.end(), xb.begin(),
                                        xb.end());
  });
  std::vector<std::size_t> group_start;
  for (std::size_t r = 0; r < m; ++r) {
    const auto prev =
        r == 0 ? std::span<const double>{} : data.covariates(order[r - 1]);
    const auto cur = data.covariates(order[r]);
    if (r == 0 || !std::equal(cur.begin(), cur.end(), prev.begin(), prev.end())) {
      group_start.push_back(r);
    }
  }
  group_start.push_back(m);

  std::vector<double> group_tmax(group_start.size() - 1);
  parallel_for(group_start.size() - 1, threads, [&](std::size_t g) {
    const std::size_t lo = group_start[g];
    const std::size_t hi = group_start[g + 1];
    const std::size_t rep = order[lo];
    const HypothesisContext ctx = make_context(params, data.covariates(rep));
    const EmpiricalSample sample =
        EmpiricalSample::from_sorted(evaluate_null_sorted(ctx, pool));
    group_tmax[g] = half_cdf_cutpoint(sample.values());
    for (std::size_t r = lo; r < hi; ++r) {
      const std::size_t i = order[r];
      const double t =
          ctx.assessor(std::log(data.u[i]), std::log1p(-data.u[i]));
      const double s = sample.ecdf_leq(t);
      stats.t_hat[i] = t;
      stats.s_hat[i] = s;
      stats.t_mirror[i] = sample.quantile(1.0 - s);
    }
  });
  stats.t_max =
      *std::min_element(group_tmax.begin(), group_tmax.end());
  return stats;
}

AsympRunResult run_zap_asymp(const TestingInput& data, double alpha,
                             const AsympConfig& config) {
  if (data.size() < 10) {
    throw std::invalid_argument("run_zap_asymp: need at least 10 hypotheses");
  }
  AsympRunResult out;
  out.fit = fit_full_em(data, config.gammas, config.em);
  out.statistics =
      compute_assessor_statistics(out.fit.params, data, config.seed,
                                  config.n_monte_carlo, config.threads);
  const double t_max = config.prototype_tmax
                           ? out.statistics.t_max
                           : std::numeric_limits<double>::infinity();
  out.rejection = select_threshold_asymp(out.statistics.t_hat,
                                         out.statistics.t_mirror, alpha, t_max);
  return out;
}

}  // namespace zap
