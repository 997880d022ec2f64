#include "zap/masking.hpp"

#include <algorithm>
#include <stdexcept>

namespace zap {

double reflect(double u) noexcept {
  const double r = u > 0.5 ? 1.5 - u : 0.5 - u;
  return clamp_unit(r);
}

Region partition(double u, double s_l_i, double s_r_i) {
  if (!(s_l_i >= 0.0 && s_l_i <= 0.25)) {
    throw std::domain_error("partition: s_l must lie in [0, 0.25]");
  }
  if (!(s_r_i >= 0.75 && s_r_i <= 1.0)) {
    throw std::domain_error("partition: s_r must lie in [0.75, 1]");
  }
  if (u <= 0.5) {
    if (u <= s_l_i) return Region::kRejectLeft;
    if (u >= 0.5 - s_l_i) return Region::kAcceptLeft;
    return Region::kUnmasked;
  }
  if (u >= s_r_i) return Region::kRejectRight;
  if (u <= 1.5 - s_r_i) return Region::kAcceptRight;
  return Region::kUnmasked;
}

MaskState masked_view(const TestingInput& data,
                      ThresholdFunctions thresholds) {
  data.validate();
  const std::size_t m = data.size();
  if (thresholds.s_l.size() != m || thresholds.s_r.size() != m) {
    throw std::invalid_argument(
        "masked_view: thresholds must be indexed consistently with the data");
  }
  MaskState state;
  state.region.resize(m);
  state.u_tilde.resize(m);
  state.revealed.assign(m, 0);
  state.thresholds = std::move(thresholds);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = data.u[i];
    const Region r =
        partition(u, state.thresholds.s_l[i], state.thresholds.s_r[i]);
    state.region[i] = r;
    if (r == Region::kUnmasked) {
      state.u_tilde[i] = {u, u};
    } else {
      const double v = reflect(u);
      state.u_tilde[i] = {std::min(u, v), std::max(u, v)};
      if (is_reject(r)) {
        ++state.reject_count;
      } else {
        ++state.accept_count;
      }
    }
  }
  return state;
}

double fdp_finite(const MaskState& state) noexcept {
  const double r = static_cast<double>(state.reject_count);
  return (1.0 + static_cast<double>(state.accept_count)) / std::max(r, 1.0);
}

}  // namespace zap
