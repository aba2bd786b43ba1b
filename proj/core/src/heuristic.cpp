#include "blinkword/heuristic.hpp"

#include <cmath>

#include "blinkword/errors.hpp"

namespace blinkword {

HeuristicModel::HeuristicModel(double variance_threshold, double slope)
    : variance_threshold_(variance_threshold), slope_(slope) {
  if (!(variance_threshold > 0) || !std::isfinite(variance_threshold)) {
    throw ArgumentError("variance threshold must be positive");
  }
  if (!(slope > 0) || !std::isfinite(slope)) {
    throw ArgumentError("logistic slope must be positive");
  }
}

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double pixel_variance(const Frame& frame) {
  const auto px = frame.pixels();
  double sum = 0.0;
  for (auto p : px) sum += p;
  const double mean = sum / static_cast<double>(px.size());
  double acc = 0.0;
  for (auto p : px) {
    const double d = p - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(px.size());
}

double HeuristicModel::classify(const Frame& frame) const {
  return logistic(slope_ * (variance_threshold_ - pixel_variance(frame)));
}

EyeState decide(double confidence, double threshold) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw ArgumentError("confidence must lie in [0, 1]");
  }
  return confidence >= threshold ? EyeState::kClosed : EyeState::kOpen;
}

}  // namespace blinkword
