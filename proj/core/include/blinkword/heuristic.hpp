#pragma once

#include <string>

#include "blinkword/classifier.hpp"

namespace blinkword {

// Variance baseline: a closed lid is nearly uniform, an open eye has a bright
// sclera and a dark pupil.
//   confidence = logistic(slope * (variance_threshold - variance))
class HeuristicModel final : public Classifier {
 public:
  HeuristicModel() = default;
  HeuristicModel(double variance_threshold, double slope);

  double classify(const Frame& frame) const override;
  std::string name() const override { return "heuristic"; }

  double variance_threshold() const noexcept { return variance_threshold_; }
  double slope() const noexcept { return slope_; }

  bool operator==(const HeuristicModel& other) const {
    return variance_threshold_ == other.variance_threshold_ && slope_ == other.slope_;
  }

 private:
  double variance_threshold_ = 900.0;
  double slope_ = 0.01;
};

// Population variance of the frame's intensities.
double pixel_variance(const Frame& frame);

double logistic(double z);

}  // namespace blinkword
