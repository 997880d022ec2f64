// Test-only reference implementations, independent of the library code paths
// they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace test_oracles {

// Normal CDF via the Taylor series Phi(z) = 1/2 + phi(z) sum z^(2k+1)/(2k+1)!!
// in long double; accurate to ~1e-17 for |z| <= 8.
inline long double normal_cdf_series(long double z) {
  const long double phi =
      std::exp(-0.5L * z * z) * 0.398942280401432677939946059934L;
  long double term = z;
  long double sum = z;
  for (int k = 1; k < 400; ++k) {
    term *= z * z / (2.0L * k + 1.0L);
    sum += term;
    if (std::abs(term) < 1e-25L * std::abs(sum)) break;
  }
  return 0.5L + phi * sum;
}

// Euler-Mascheroni constant from the harmonic-sum expansion.
inline long double euler_gamma() {
  const int n = 4000;
  long double h = 0.0L;
  for (int k = 1; k <= n; ++k) h += 1.0L / k;
  const long double nn = n;
  return h - std::log(nn) - 1.0L / (2.0L * nn) + 1.0L / (12.0L * nn * nn) -
         1.0L / (120.0L * nn * nn * nn * nn);
}

// Fixed-grid tanh-sinh quadrature on (0,1); the double-exponential change of
// variables absorbs integrable endpoint singularities.  The integrand
// receives (u, 1-u) so both endpoint distances keep full precision.
inline double integrate_unit_interval(
    const std::function<double(double, double)>& f) {
  const double pi_half = 1.5707963267948966;
  const double h = 1.0 / 128.0;
  const int k_max = 128 * 6;
  double total = 0.0;
  for (int k = -k_max; k <= k_max; ++k) {
    const double t = h * k;
    const double s = pi_half * std::sinh(t);
    // x = (1 + tanh(s))/2 written in logistic form for tail precision.
    const double x = 1.0 / (1.0 + std::exp(-2.0 * s));
    const double one_minus_x = 1.0 / (1.0 + std::exp(2.0 * s));
    if (!(x > 0.0 && one_minus_x > 0.0)) continue;
    const double sech = 1.0 / std::cosh(s);
    const double w = 0.5 * pi_half * std::cosh(t) * sech * sech;
    const double term = h * w * f(x, one_minus_x);
    if (std::isfinite(term)) total += term;
  }
  return total;
}

// Exhaustive step-up scan used against the BH implementation.
inline std::vector<std::size_t> bh_bruteforce(const std::vector<double>& p,
                                              double alpha) {
  const std::size_t m = p.size();
  std::vector<double> sorted(p);
  std::sort(sorted.begin(), sorted.end());
  std::size_t best = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    if (sorted[k - 1] <= static_cast<double>(k) * alpha / static_cast<double>(m))
      best = k;
  }
  std::vector<std::size_t> out;
  if (best == 0) return out;
  const double cut = sorted[best - 1];
  for (std::size_t i = 0; i < m; ++i)
    if (p[i] <= cut) out.push_back(i);
  return out;
}

}  // namespace test_oracles
