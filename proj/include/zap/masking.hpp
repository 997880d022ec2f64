#pragma once

#include <cstddef>
#include <vector>

#include "zap/model.hpp"

namespace zap {

enum class Region : unsigned char {
  kRejectLeft,
  kAcceptLeft,
  kRejectRight,
  kAcceptRight,
  kUnmasked,
};

inline bool is_reject(Region r) noexcept {
  return r == Region::kRejectLeft || r == Region::kRejectRight;
}
inline bool is_accept(Region r) noexcept {
  return r == Region::kAcceptLeft || r == Region::kAcceptRight;
}

// Reflection about u = 0.25 on the left group (u <= 0.5) and u = 0.75 on the
// right group, clamped into the open unit interval.
double reflect(double u) noexcept;

// Pointwise thresholding values evaluated at the observed covariates; the
// left thresholds only ever decrease over algorithm time and the right ones
// only increase.
struct ThresholdFunctions {
  std::vector<double> s_l;  // in [0, 0.25]
  std::vector<double> s_r;  // in [0.75, 1]
};

// Candidate-rejection / acceptance label for one u-value.  Throws when the
// thresholds leave their ranges.  Reject takes precedence on the shared
// boundary s_l = 0.25 (resp. s_r = 0.75).
Region partition(double u, double s_l_i, double s_r_i);

// An unordered masked pair stored canonically as (lo <= hi); singletons have
// lo == hi.  Downstream code must treat masked pairs symmetrically.
struct MaskedPair {
  double lo = 0.0;
  double hi = 0.0;
  bool is_pair() const noexcept { return lo != hi; }
};

struct MaskState {
  std::vector<Region> region;
  std::vector<MaskedPair> u_tilde;
  std::vector<char> revealed;  // overrides the geometric partition
  ThresholdFunctions thresholds;
  int step = 0;
  std::size_t reject_count = 0;
  std::size_t accept_count = 0;

  std::size_t size() const noexcept { return region.size(); }
  bool masked(std::size_t i) const noexcept {
    return region[i] != Region::kUnmasked;
  }
  std::size_t masked_count() const noexcept {
    return reject_count + accept_count;
  }
};

// Applies the partition per hypothesis and builds the masked view: masked
// entries carry the unordered pair {u, reflect(u)}, unmasked entries the
// plain value.
MaskState masked_view(const TestingInput& data, ThresholdFunctions thresholds);

// (1 + |A_t|) / (|R_t| v 1).
double fdp_finite(const MaskState& state) noexcept;

}  // namespace zap
