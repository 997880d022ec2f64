#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "zap/em.hpp"
#include "zap/model.hpp"
#include "zap/result.hpp"

namespace zap {

struct AsympConfig {
  std::uint64_t seed = 1;
  std::size_t n_monte_carlo = 50000;
  std::pair<double, double> gammas{4.0, 4.0};
  EmConfig em;
  int threads = 1;
  // Restricts candidate thresholds to values whose simulated null CDF stays
  // at or below one half for every hypothesis (the prototype variant); the
  // step-wise procedure scans all observed statistics by default.
  bool prototype_tmax = false;
};

// Per-hypothesis significance indices, their simulated-null positions and the
// mirror statistics.
struct AssessorStatistics {
  std::vector<double> t_hat;
  std::vector<double> t_mirror;
  std::vector<double> s_hat;
  std::uint64_t null_samples_seed = 0;
  std::size_t n_monte_carlo = 0;
  double t_max = std::numeric_limits<double>::infinity();
};

// Simulated null distribution of the significance index at one covariate
// value: the sorted assessor values over the shared uniform pool.
EmpiricalSample null_reference(const BetaMixtureParams& params,
                               std::span<const double> x,
                               const std::vector<double>& shared_uniforms);

// S = ecdf(t); returns quantile(1 - S).
double mirror_statistic(double t_i, const EmpiricalSample& null_sample);

// Step-wise threshold selection over the observed statistics; rejects the
// maximal prefix whose estimated FDP stays at or below alpha.
RejectionResult select_threshold_asymp(
    const std::vector<double>& t_hat, const std::vector<double>& t_mirror,
    double alpha,
    double t_max = std::numeric_limits<double>::infinity());

AssessorStatistics compute_assessor_statistics(const BetaMixtureParams& params,
                                               const TestingInput& data,
                                               std::uint64_t seed,
                                               std::size_t n_monte_carlo,
                                               int threads = 1);

struct AsympRunResult {
  RejectionResult rejection;
  AssessorStatistics statistics;
  EmFitReport fit;
};

AsympRunResult run_zap_asymp(const TestingInput& data, double alpha,
                             const AsympConfig& config);

}  // namespace zap
