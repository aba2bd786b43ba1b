#pragma once

#include <cstddef>
#include <span>

#include "blinkword/dataset.hpp"
#include "blinkword/tinynet.hpp"

namespace blinkword {

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_parameter = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t parameters_checked = 0;
};

// Relative error |a - n| / max(|a|, |n|); pairs where both magnitudes are
// below kGradientFloor count as agreeing exactly.
inline constexpr double kGradientFloor = 1e-8;

// Compares loss_and_gradient against central differences of the loss for
// every parameter. Loss differences are evaluated with plain loops over
// cached activations, independent of the Eigen path used by
// loss_and_gradient, and in log1p/expm1 form so gradients near 1e-8 are not
// swamped by round-off.
GradientCheckResult gradient_check(const TinyNet& model,
                                   std::span<const LabeledFrame> batch,
                                   double epsilon = 1e-5);

}  // namespace blinkword
