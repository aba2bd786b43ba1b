#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "blinkword/classifier.hpp"
#include "blinkword/frame.hpp"

namespace blinkword {

struct LatencyStats {
  std::vector<double> samples_ms;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double p99_ms = 0.0;
  double max_ms = 0.0;
  double budget_ms = 0.0;
  std::size_t budget_violations = 0;  // samples strictly above budget_ms
  std::size_t frames_total = 0;
};

// Nearest-rank percentile (p in (0, 100]) of an unsorted sample.
double percentile(std::span<const double> samples, double p);

LatencyStats summarize_latencies(std::vector<double> samples_ms, double budget_ms);

struct MeasureOptions {
  std::size_t repetitions = 1;
  bool discard_first_repetition = false;
  double budget_ms = 100.0;
};

// Times every classify call with a monotonic clock.
LatencyStats measure_latency(const Classifier& classifier, std::span<const Frame> frames,
                             const MeasureOptions& options = {});

}  // namespace blinkword
