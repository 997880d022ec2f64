#include "zap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "zap/numeric.hpp"

namespace zap {

namespace {

double log_normal_pdf(double t) noexcept {
  return -0.5 * t * t - 0.91893853320467274178;  // log sqrt(2 pi)
}

}  // namespace

double OracleModel::alt_weight(std::span<const double> x) const {
  double w = 0.0;
  for (const auto& c : components) w += c.weight(x);
  return w;
}

double OracleModel::null_weight(std::span<const double> x) const {
  return 1.0 - alt_weight(x);
}

double OracleModel::density_z(double z, std::span<const double> x) const {
  double f = null_weight(x) * normal_pdf(z);
  for (const auto& c : components) {
    f += c.weight(x) * normal_pdf((z - c.mean(x)) / c.sigma) / c.sigma;
  }
  return f;
}

double clfdr_true(const OracleModel& model, OracleMode mode, double value,
                  std::span<const double> x) {
  const double w0 = model.null_weight(x);
  if (w0 <= 0.0) return 0.0;
  if (model.components.empty()) return 1.0;

  if (mode == OracleMode::kZScale) {
    const double z = value;
    double ratio = 0.0;  // w_x f_1x / ((1-w_x) f_0), accumulated in log space
    const double lf0 = log_normal_pdf(z);
    for (const auto& c : model.components) {
      const double wj = c.weight(x);
      if (wj <= 0.0) continue;
      const double t = (z - c.mean(x)) / c.sigma;
      ratio += std::exp(std::log(wj) + log_normal_pdf(t) - std::log(c.sigma) -
                        std::log(w0) - lf0);
    }
    return 1.0 / (1.0 + ratio);
  }

  // Two-sided p-scale: the null p-density is 1; the alternative density of
  // p = 2 Phi(-|Z|) under a N(mu, sigma^2) component is
  // [phi((q-mu)/sigma) + phi((-q-mu)/sigma)] / (2 sigma phi(q)), q = |z_p|.
  const double p = value;
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::domain_error("clfdr_true: p-scale value must be in (0,1]");
  }
  const double q = p == 1.0 ? 0.0 : -normal_quantile(0.5 * p);
  const double lphi_q = log_normal_pdf(q);
  double ratio = 0.0;  // w_x g_1x / (1 - w_x)
  for (const auto& c : model.components) {
    const double wj = c.weight(x);
    if (wj <= 0.0) continue;
    const double mu = c.mean(x);
    const double a = log_normal_pdf((q - mu) / c.sigma);
    const double b = log_normal_pdf((-q - mu) / c.sigma);
    const double m = std::max(a, b);
    const double lg = m + std::log(std::exp(a - m) + std::exp(b - m)) -
                      std::log(2.0 * c.sigma) - lphi_q;
    ratio += std::exp(std::log(wj) - std::log(w0) + lg);
  }
  return 1.0 / (1.0 + ratio);
}

std::pair<OracleThreshold, std::vector<std::size_t>> oracle_threshold(
    const std::vector<double>& clfdr_values, double alpha) {
  const std::size_t m = clfdr_values.size();
  std::vector<double> sorted(clfdr_values);
  std::sort(sorted.begin(), sorted.end());

  OracleThreshold best;
  long double running = 0.0L;
  for (std::size_t i = 0; i < m; ++i) {
    running += sorted[i];
    const double mean = static_cast<double>(running) / static_cast<double>(i + 1);
    if (mean <= alpha) {
      best.j = i + 1;
      best.threshold_value = sorted[i];
      best.conditional_fdr = mean;
    }
  }

  std::vector<std::size_t> rejected;
  if (best.j > 0) {
    for (std::size_t i = 0; i < m; ++i) {
      if (clfdr_values[i] <= best.threshold_value) rejected.push_back(i);
    }
  }
  return {best, rejected};
}

RejectionResult run_oracle(const OracleModel& model, OracleMode mode,
                           const TestingInput& data, double alpha) {
  data.validate();
  const std::size_t m = data.size();
  std::vector<double> clfdr(m);
  for (std::size_t i = 0; i < m; ++i) {
    double value;
    if (mode == OracleMode::kZScale) {
      if (!data.has_z()) {
        throw std::invalid_argument("run_oracle: z-scale mode needs z-values");
      }
      value = data.z[i];
    } else {
      value = data.has_z() ? 2.0 * normal_cdf(-std::abs(data.z[i]))
                           : 2.0 * std::min(data.u[i], 1.0 - data.u[i]);
    }
    clfdr[i] = clfdr_true(model, mode, value, data.covariates(i));
  }

  auto [threshold, rejected] = oracle_threshold(clfdr, alpha);
  RejectionResult res;
  res.rejected = std::move(rejected);
  res.stats = std::move(clfdr);
  if (threshold.j > 0) {
    res.threshold = threshold.threshold_value;
    res.fdp_estimate = threshold.conditional_fdr;
  }
  return res;
}

std::pair<double, double> rejection_boundary_ex22(double x,
                                                  double lambda_star) {
  if (!(x > -1.0 && x < 1.0)) {
    throw std::domain_error("rejection_boundary_ex22: x must be in (-1,1)");
  }
  if (!(lambda_star > 0.0 && lambda_star < 1.0)) {
    throw std::domain_error(
        "rejection_boundary_ex22: lambda* must be in (0,1)");
  }
  const double mu = 1.5;
  const double r = (1.0 - lambda_star) / lambda_star;
  const double disc =
      16.0 * r * r * std::exp(mu * mu) - (1.0 - x) * (1.0 + x);
  if (!(disc > 0.0)) {
    throw std::domain_error("rejection_boundary_ex22: negative discriminant");
  }
  const double a = 4.0 * r * std::exp(0.5 * mu * mu);
  const double lo_arg = (a - std::sqrt(disc)) / (1.0 + x);
  const double hi_arg = (a + std::sqrt(disc)) / (1.0 + x);
  if (!(lo_arg > 0.0)) {
    throw std::domain_error("rejection_boundary_ex22: non-positive log argument");
  }
  return {std::log(lo_arg) / mu, std::log(hi_arg) / mu};
}

}  // namespace zap
