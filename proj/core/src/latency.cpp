#include "blinkword/latency.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "blinkword/errors.hpp"

namespace blinkword {

double percentile(std::span<const double> samples, double p) {
  if (samples.empty()) return 0.0;
  if (!(p > 0.0 && p <= 100.0)) throw ArgumentError("percentile must lie in (0, 100]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * sorted.size()));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

LatencyStats summarize_latencies(std::vector<double> samples_ms, double budget_ms) {
  LatencyStats stats;
  stats.budget_ms = budget_ms;
  stats.frames_total = samples_ms.size();
  if (!samples_ms.empty()) {
    stats.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) /
                    static_cast<double>(samples_ms.size());
    stats.p50_ms = percentile(samples_ms, 50);
    stats.p95_ms = percentile(samples_ms, 95);
    stats.p99_ms = percentile(samples_ms, 99);
    stats.max_ms = *std::max_element(samples_ms.begin(), samples_ms.end());
    stats.budget_violations = static_cast<std::size_t>(std::count_if(
        samples_ms.begin(), samples_ms.end(), [&](double v) { return v > budget_ms; }));
  }
  stats.samples_ms = std::move(samples_ms);
  return stats;
}

LatencyStats measure_latency(const Classifier& classifier, std::span<const Frame> frames,
                             const MeasureOptions& options) {
  if (frames.empty()) throw ArgumentError("latency measurement needs at least one frame");
  if (options.repetitions == 0) throw ArgumentError("repetitions must be at least 1");
  using Clock = std::chrono::steady_clock;
  std::vector<double> samples;
  samples.reserve(frames.size() * options.repetitions);
  volatile double sink = 0.0;
  for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
    const bool keep = !(options.discard_first_repetition && rep == 0 && options.repetitions > 1);
    for (const auto& frame : frames) {
      const auto start = Clock::now();
      sink = sink + classifier.classify(frame);
      const std::chrono::duration<double, std::milli> elapsed = Clock::now() - start;
      if (keep) samples.push_back(elapsed.count());
    }
  }
  return summarize_latencies(std::move(samples), options.budget_ms);
}

}  // namespace blinkword
