#pragma once

#include <string>

#include "blinkword/frame.hpp"

namespace blinkword {

inline constexpr double kDefaultDecisionThreshold = 0.5;

// The pluggable Open/Closed slot. classify must be a pure function of the
// frame's pixels and safe to call concurrently on a const instance.
class Classifier {
 public:
  virtual ~Classifier() = default;

  // Probability that the eye in `frame` is Closed, in [0, 1].
  virtual double classify(const Frame& frame) const = 0;
  virtual std::string name() const = 0;
};

// Closed iff confidence >= threshold. Confidence outside [0,1] is an
// ArgumentError.
EyeState decide(double confidence, double threshold = kDefaultDecisionThreshold);

}  // namespace blinkword
