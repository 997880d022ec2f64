#include "zap/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zap {

namespace {

double lgamma_pos(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

}  // namespace

double normal_pdf(double z) noexcept {
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) noexcept {
  return 0.5 * std::erfc(-z * M_SQRT1_2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must be in (0,1)");
  }
  // For p above one half, 1-p is exact (Sterbenz), so reflect and keep full
  // precision in the tail argument.
  if (p > 0.5) return -normal_quantile(1.0 - p);

  // Acklam's rational approximation on the lower half, then one Newton step.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};

  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }

  const double dens = normal_pdf(x);
  if (dens > 0.0) {
    x -= (normal_cdf(x) - p) / dens;
  }
  return x;
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("log_beta: arguments must be positive");
  }
  return lgamma_pos(a) + lgamma_pos(b) - lgamma_pos(a + b);
}

double digamma(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("digamma: argument must be positive");
  }
  double r = 0.0;
  while (x < 10.0) {
    r -= 1.0 / x;
    x += 1.0;
  }
  const double ix = 1.0 / x;
  const double ix2 = ix * ix;
  // Asymptotic series with Bernoulli coefficients.
  const double series =
      ix2 *
      (1.0 / 12.0 -
       ix2 * (1.0 / 120.0 -
              ix2 * (1.0 / 252.0 -
                     ix2 * (1.0 / 240.0 -
                            ix2 * (1.0 / 132.0 - ix2 * (691.0 / 32760.0))))));
  return r + std::log(x) - 0.5 * ix - series;
}

double trigamma(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("trigamma: argument must be positive");
  }
  double r = 0.0;
  while (x < 10.0) {
    r += 1.0 / (x * x);
    x += 1.0;
  }
  const double ix = 1.0 / x;
  const double ix2 = ix * ix;
  const double series =
      1.0 +
      ix * (0.5 +
            ix * (1.0 / 6.0 -
                  ix2 * (1.0 / 30.0 -
                         ix2 * (1.0 / 42.0 -
                                ix2 * (1.0 / 30.0 - ix2 * (5.0 / 66.0))))));
  return r + ix * series;
}

double clamp_unit(double u) noexcept {
  return std::min(std::max(u, kEpsU), 1.0 - kEpsU);
}

EmpiricalSample::EmpiricalSample(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("EmpiricalSample: empty sample");
  }
  std::sort(values.begin(), values.end());
  values_ = std::move(values);
}

EmpiricalSample EmpiricalSample::from_sorted(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("EmpiricalSample: empty sample");
  }
  EmpiricalSample s;
  s.values_ = std::move(values);
  return s;
}

double EmpiricalSample::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::domain_error("EmpiricalSample::quantile: q must be in [0,1]");
  }
  const std::size_t n = values_.size();
  if (n == 1) return values_[0];
  const double h = q * static_cast<double>(n - 1);
  const std::size_t j = std::min(static_cast<std::size_t>(h), n - 2);
  const double g = h - static_cast<double>(j);
  return values_[j] + g * (values_[j + 1] - values_[j]);
}

double EmpiricalSample::ecdf_leq(double t) const noexcept {
  const auto it = std::upper_bound(values_.begin(), values_.end(), t);
  return static_cast<double>(it - values_.begin()) /
         static_cast<double>(values_.size());
}

}  // namespace zap
