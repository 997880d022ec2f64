#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace zap {

// Outcome of a thresholding procedure.  `fdp_estimate` is the estimator value
// at the selected threshold and is +inf when nothing could be rejected.
struct RejectionResult {
  std::vector<std::size_t> rejected;  // ascending hypothesis indices
  double threshold = -std::numeric_limits<double>::infinity();
  double fdp_estimate = std::numeric_limits<double>::infinity();
  std::vector<double> stats;  // per-hypothesis significance values
};

}  // namespace zap
