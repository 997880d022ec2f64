#pragma once

#include <cstddef>
#include <vector>

namespace zap {

// Width of the clamp that keeps u-values strictly inside (0,1).  Phi(z)
// underflows to 0/1 for |z| beyond ~8.3; clamping keeps log-densities finite
// while preserving the ordering of the statistics.
inline constexpr double kEpsU = 1e-15;

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Standard normal density, distribution function and quantile.
double normal_pdf(double z) noexcept;
double normal_cdf(double z) noexcept;

// Inverse of normal_cdf.  Throws std::domain_error unless p is in (0,1).
double normal_quantile(double p);

// log B(a,b) = lgamma(a) + lgamma(b) - lgamma(a+b), a,b > 0.
double log_beta(double a, double b);

// Digamma / trigamma for positive arguments.
double digamma(double x);
double trigamma(double x);

// Clamp into [kEpsU, 1 - kEpsU].
double clamp_unit(double u) noexcept;

// A sorted sample of reals supporting interpolated order-statistic quantiles
// at plotting positions (j-1)/(N-1) and the weak-inequality empirical CDF.
class EmpiricalSample {
 public:
  // Sorts the input.  Throws std::invalid_argument on an empty sample.
  explicit EmpiricalSample(std::vector<double> values);

  // Adopts an already ascending-sorted vector without re-sorting.
  static EmpiricalSample from_sorted(std::vector<double> values);

  // Linearly interpolated quantile; q must lie in [0,1].  q=0 gives the
  // minimum, q=1 the maximum.
  double quantile(double q) const;

  // #{v <= t} / N.
  double ecdf_leq(double t) const noexcept;

  std::size_t size() const noexcept { return values_.size(); }
  double min() const noexcept { return values_.front(); }
  double max() const noexcept { return values_.back(); }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  EmpiricalSample() = default;
  std::vector<double> values_;
};

}  // namespace zap
