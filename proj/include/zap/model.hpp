#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "zap/numeric.hpp"

namespace zap {

// Linear predictors are clamped to this box before exponentiation so the
// link probabilities stay monotone in the predictor without overflowing.
inline constexpr double kMaxLinearPredictor = 35.0;

// A value strictly inside (0,1).  Construction clamps into
// [kEpsU, 1 - kEpsU]; NaN is rejected.
class UnitInterval {
 public:
  static UnitInterval clamped(double u);
  double value() const noexcept { return v_; }

 private:
  explicit UnitInterval(double v) noexcept : v_(v) {}
  double v_;
};

enum class Side { kLeft, kRight };

// Coefficients of the three-component beta-mixture working model: multinomial
// link coefficients for the left/right mixing weights and logistic link
// coefficients for the two beta shape parameters, plus the fixed shapes.
struct BetaMixtureParams {
  std::vector<double> theta_l;
  std::vector<double> theta_r;
  std::vector<double> beta_l;
  std::vector<double> beta_r;
  double gamma_l = 4.0;
  double gamma_r = 4.0;

  std::size_t dim() const noexcept { return theta_l.size(); }

  // Throws std::invalid_argument if coefficient lengths differ or a fixed
  // shape is not > 2 (the convexity requirement of the mixture components).
  void validate() const;

  // Zero-slope parameters with link intercepts chosen so that
  // pi_l = pi_r = pi0 and k_l = k_r = k0 at every covariate value.
  static BetaMixtureParams intercept_init(std::size_t p, double pi0, double k0,
                                          double gamma_l, double gamma_r);
};

// The working model evaluated at one covariate value.
struct LocalMixture {
  double pi_l = 0.0;
  double pi_r = 0.0;
  double k_l = 0.5;
  double k_r = 0.5;
};

// The full dataset: u-values (clamped into the open unit interval), an m-by-p
// covariate matrix in row-major order, and optionally the originating
// z-values.
struct TestingInput {
  std::vector<double> u;
  std::vector<double> x;  // m * p, row-major
  std::size_t p = 0;
  std::vector<double> z;  // empty when the data arrived on the u-scale

  std::size_t size() const noexcept { return u.size(); }
  std::span<const double> covariates(std::size_t i) const noexcept {
    return {x.data() + i * p, p};
  }
  bool has_z() const noexcept { return !z.empty(); }

  static TestingInput from_z(std::vector<double> z_values,
                             std::vector<double> covariates, std::size_t p);
  static TestingInput from_u(std::vector<double> u_values,
                             std::vector<double> covariates, std::size_t p);
  void validate() const;
};

// pi_l = e^{eta_l} / (1 + e^{eta_l} + e^{eta_r}) and symmetrically for pi_r,
// with eta = (1, x)^T theta clamped to the predictor box.
std::pair<double, double> link_probabilities(const std::vector<double>& theta_l,
                                             const std::vector<double>& theta_r,
                                             std::span<const double> x);

// Logistic link for a beta shape: k = 1 / (1 + e^{-(1,x)^T beta}), kept
// strictly inside (0,1).
double link_shape(const std::vector<double>& beta, std::span<const double> x);

LocalMixture local_mixture(const BetaMixtureParams& params,
                           std::span<const double> x);

// Left:  u^{k-1} (1-u)^{gamma-1} / B(k, gamma)
// Right: u^{gamma-1} (1-u)^{k-1} / B(gamma, k)
// Evaluated in log space and exponentiated.
double beta_component_density(UnitInterval u, double k, double gamma,
                              Side side);

double working_density(UnitInterval u, const BetaMixtureParams& params,
                       std::span<const double> x);

// a_x(u) = (1 - pi_l - pi_r) / h_x(u); values in (0, 1] under the model's
// density lower bound.  Throws when pi_l + pi_r degenerates to 1.
double assessor_eval(UnitInterval u, const BetaMixtureParams& params,
                     std::span<const double> x);

// Phi(z) clamped into the open unit interval.  Throws on NaN.
UnitInterval u_transform(double z);

// Per-hypothesis evaluation context: the local mixture with its log weights
// and normalizing constants precomputed, so densities and assessor values
// reduce to a couple of fused multiply-adds and exponentials.
struct HypothesisContext {
  double log_pi0 = 0.0;
  double log_pi_l = 0.0;  // -inf when pi_l == 0
  double log_pi_r = 0.0;
  double k_l = 0.5;
  double k_r = 0.5;
  double gamma_l = 4.0;
  double gamma_r = 4.0;
  double lbeta_l = 0.0;  // log B(k_l, gamma_l)
  double lbeta_r = 0.0;  // log B(gamma_r, k_r)

  // log h_l(u), log h_r(u) given lu = log u and l1mu = log(1-u).
  double log_beta_left(double lu, double l1mu) const noexcept {
    return (k_l - 1.0) * lu + (gamma_l - 1.0) * l1mu - lbeta_l;
  }
  double log_beta_right(double lu, double l1mu) const noexcept {
    return (gamma_r - 1.0) * lu + (k_r - 1.0) * l1mu - lbeta_r;
  }
  double log_density(double lu, double l1mu) const noexcept;
  double assessor(double lu, double l1mu) const noexcept {
    return std::exp(log_pi0 - log_density(lu, l1mu));
  }
};

HypothesisContext make_context(const BetaMixtureParams& params,
                               std::span<const double> x);

}  // namespace zap
