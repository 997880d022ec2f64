#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "zap/model.hpp"
#include "zap/result.hpp"

namespace zap {

// One alternative component of a true generative model: a normal with
// covariate-dependent mixing weight and mean.
struct OracleComponent {
  std::function<double(std::span<const double>)> weight;
  std::function<double(std::span<const double>)> mean;
  double sigma = 1.0;
};

// A true generative description sufficient to evaluate the conditional local
// false discovery rate exactly, on either the z- or the two-sided p-scale.
struct OracleModel {
  std::vector<OracleComponent> components;

  double alt_weight(std::span<const double> x) const;   // w_x
  double null_weight(std::span<const double> x) const;  // 1 - w_x
  double density_z(double z, std::span<const double> x) const;  // f_x(z)
};

enum class OracleMode { kZScale, kPScale };

// P(H = 0 | statistic, x) under the model.  On the z-scale `value` is a
// z-value; on the p-scale it is a two-sided p-value in (0, 1].
double clfdr_true(const OracleModel& model, OracleMode mode, double value,
                  std::span<const double> x);

struct OracleThreshold {
  std::size_t j = 0;             // number rejected (maximal feasible rank)
  double threshold_value = 0.0;  // L_(j); meaningful when j >= 1
  double conditional_fdr = 0.0;  // running mean at j
};

// Rank-based thresholding of posterior probabilities: sorts ascending and
// rejects the longest prefix whose running mean stays at or below alpha.
std::pair<OracleThreshold, std::vector<std::size_t>> oracle_threshold(
    const std::vector<double>& clfdr_values, double alpha);

RejectionResult run_oracle(const OracleModel& model, OracleMode mode,
                           const TestingInput& data, double alpha);

// Closed-form boundary points of the z-scale oracle rejection region for the
// two-sided mixture with unit-variance alternatives at -1.5 and +1.5 and
// covariate-tilted weights (1-x)/10 and (1+x)/10.  Throws a domain error when
// the discriminant or a log argument is not positive.
std::pair<double, double> rejection_boundary_ex22(double x,
                                                  double lambda_star);

}  // namespace zap
